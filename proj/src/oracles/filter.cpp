#include "invdes/oracles/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invdes/model.hpp"

namespace invdes::oracles {

namespace {

using cplx = std::complex<double>;
using Roots = std::vector<cplx>;

constexpr double kMinus3Db = -3.0102999566398120;  // 10*log10(1/2)
constexpr double kDbFloor = -400.0;
constexpr double kGuardFraction = 0.25;
constexpr double kTransitionReferenceDb = 20.0;

cplx prod_neg(const Roots& r) {
  cplx acc{1.0, 0.0};
  for (const auto& x : r) acc *= -x;
  return acc;
}

Zpk buttap(int n) {
  Zpk out;
  for (int m = -n + 1; m < n; m += 2) out.poles.push_back(-std::exp(cplx{0.0, M_PI * m / (2.0 * n)}));
  return out;
}

Zpk cheb1ap(int n, double rp) {
  Zpk out;
  const double eps = std::sqrt(std::pow(10.0, 0.1 * rp) - 1.0);
  const double mu = std::asinh(1.0 / eps) / n;
  for (int m = -n + 1; m < n; m += 2) {
    const double theta = M_PI * m / (2.0 * n);
    out.poles.push_back(-std::sinh(cplx{mu, theta}));
  }
  out.gain = prod_neg(out.poles).real();
  if (n % 2 == 0) out.gain /= std::sqrt(1.0 + eps * eps);
  return out;
}

Zpk cheb2ap(int n, double rs) {
  Zpk out;
  const double de = 1.0 / std::sqrt(std::pow(10.0, 0.1 * rs) - 1.0);
  const double mu = std::asinh(1.0 / de) / n;
  std::vector<int> ms;
  if (n % 2 == 1) {
    for (int m = -n + 1; m < 0; m += 2) ms.push_back(m);
    for (int m = 2; m < n; m += 2) ms.push_back(m);
  } else {
    for (int m = -n + 1; m < n; m += 2) ms.push_back(m);
  }
  for (int m : ms) out.zeros.push_back(-std::conj(cplx{0.0, 1.0} / std::sin(m * M_PI / (2.0 * n))));
  for (int m = -n + 1; m < n; m += 2) {
    const cplx p = -std::exp(cplx{0.0, M_PI * m / (2.0 * n)});
    const cplx warped{std::sinh(mu) * p.real(), std::cosh(mu) * p.imag()};
    out.poles.push_back(1.0 / warped);
  }
  out.gain = (prod_neg(out.poles) / prod_neg(out.zeros)).real();
  return out;
}

Zpk lp2lp(const Zpk& in, double wo) {
  Zpk out = in;
  for (auto& z : out.zeros) z *= wo;
  for (auto& p : out.poles) p *= wo;
  out.gain = in.gain * std::pow(wo, static_cast<double>(in.poles.size() - in.zeros.size()));
  return out;
}

Zpk lp2hp(const Zpk& in, double wo) {
  Zpk out;
  for (const auto& z : in.zeros) out.zeros.push_back(wo / z);
  for (const auto& p : in.poles) out.poles.push_back(wo / p);
  out.zeros.insert(out.zeros.end(), in.poles.size() - in.zeros.size(), cplx{0.0, 0.0});
  out.gain = in.gain * (prod_neg(in.zeros) / prod_neg(in.poles)).real();
  return out;
}

Roots split_band(const Roots& r, double scale_bw, double wo, bool invert) {
  Roots out;
  Roots base;
  for (const auto& x : r) base.push_back(invert ? scale_bw / x : x * scale_bw);
  for (const auto& x : base) out.push_back(x + std::sqrt(x * x - wo * wo));
  for (const auto& x : base) out.push_back(x - std::sqrt(x * x - wo * wo));
  return out;
}

Zpk lp2bp(const Zpk& in, double wo, double bw) {
  Zpk out;
  out.zeros = split_band(in.zeros, bw / 2.0, wo, false);
  out.poles = split_band(in.poles, bw / 2.0, wo, false);
  const std::size_t degree = in.poles.size() - in.zeros.size();
  out.zeros.insert(out.zeros.end(), degree, cplx{0.0, 0.0});
  out.gain = in.gain * std::pow(bw, static_cast<double>(degree));
  return out;
}

Zpk lp2bs(const Zpk& in, double wo, double bw) {
  Zpk out;
  out.zeros = split_band(in.zeros, bw / 2.0, wo, true);
  out.poles = split_band(in.poles, bw / 2.0, wo, true);
  const std::size_t degree = in.poles.size() - in.zeros.size();
  out.zeros.insert(out.zeros.end(), degree, cplx{0.0, wo});
  out.zeros.insert(out.zeros.end(), degree, cplx{0.0, -wo});
  out.gain = in.gain * (prod_neg(in.zeros) / prod_neg(in.poles)).real();
  return out;
}

Zpk bilinear(const Zpk& in, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  cplx num{1.0, 0.0}, den{1.0, 0.0};
  for (const auto& z : in.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= fs2 - z;
  }
  for (const auto& p : in.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  out.zeros.insert(out.zeros.end(), in.poles.size() - in.zeros.size(), cplx{-1.0, 0.0});
  out.gain = in.gain * (num / den).real();
  return out;
}

struct Interval {
  double lo;
  double hi;
};

struct BandMasks {
  std::vector<Interval> pass;
  std::vector<Interval> stop;
  bool stop_above;  // stopband lies above cutoffs[0]
};

// Pass and stop masks sit a guard fraction of the adjacent band away from
// each cutoff, so the measured ripple and attenuation ignore the transition.
BandMasks band_masks(const FilterDesign& d) {
  const double g = kGuardFraction;
  const double w1 = d.cutoffs.front();
  const double w2 = d.cutoffs.back();
  const double below = (1.0 - g) * w1;
  const double above = w2 + g * (1.0 - w2);
  const double inner_lo = w1 + g * (w2 - w1);
  const double inner_hi = w2 - g * (w2 - w1);
  BandMasks m;
  switch (d.response) {
    case FilterResponse::Lowpass:
      m = {{{0.0, below}}, {{above, 1.0}}, true};
      break;
    case FilterResponse::Highpass:
      m = {{{above, 1.0}}, {{0.0, below}}, false};
      break;
    case FilterResponse::Bandpass:
      m = {{{inner_lo, inner_hi}}, {{0.0, below}, {above, 1.0}}, false};
      break;
    case FilterResponse::Bandstop:
      m = {{{0.0, below}, {above, 1.0}}, {{inner_lo, inner_hi}}, true};
      break;
  }
  return m;
}

bool in_any(const std::vector<Interval>& ivs, double f) {
  return std::any_of(ivs.begin(), ivs.end(),
                     [f](const Interval& iv) { return f >= iv.lo - 1e-12 && f <= iv.hi + 1e-12; });
}

void validate(const FilterDesign& d) {
  if (d.order < 1 || d.order > kMaxFilterOrder) {
    throw ValidationError("filter order must lie in [1, " + std::to_string(kMaxFilterOrder) + "]");
  }
  const bool two = d.response == FilterResponse::Bandpass || d.response == FilterResponse::Bandstop;
  if (d.cutoffs.size() != (two ? 2u : 1u)) {
    throw ValidationError(two ? "band filters need two cutoffs" : "expected exactly one cutoff");
  }
  for (double c : d.cutoffs) {
    if (!(c > 0.0 && c < 1.0)) throw ValidationError("cutoffs must lie in (0, 1)");
  }
  if (two && !(d.cutoffs[0] < d.cutoffs[1])) {
    throw ValidationError("band cutoffs must be strictly increasing");
  }
  if (d.ripple_db && !(*d.ripple_db > 0.0)) throw ValidationError("ripple_db must be positive");
  if (d.attenuation_db && !(*d.attenuation_db > 0.0)) {
    throw ValidationError("attenuation_db must be positive");
  }
}

}  // namespace

FilterFamily filter_family_from_string(const std::string& s) {
  if (s == "butterworth") return FilterFamily::Butterworth;
  if (s == "chebyshev1") return FilterFamily::Chebyshev1;
  if (s == "chebyshev2") return FilterFamily::Chebyshev2;
  if (s == "elliptic") throw UnsupportedFeature("elliptic filters are not supported");
  throw ValidationError("unknown filter family '" + s + "'");
}

FilterResponse filter_response_from_string(const std::string& s) {
  if (s == "lowpass") return FilterResponse::Lowpass;
  if (s == "highpass") return FilterResponse::Highpass;
  if (s == "bandpass") return FilterResponse::Bandpass;
  if (s == "bandstop") return FilterResponse::Bandstop;
  throw ValidationError("unknown filter response '" + s + "'");
}

std::string to_string(FilterFamily f) {
  switch (f) {
    case FilterFamily::Butterworth: return "butterworth";
    case FilterFamily::Chebyshev1: return "chebyshev1";
    case FilterFamily::Chebyshev2: return "chebyshev2";
  }
  return "?";
}

std::string to_string(FilterResponse r) {
  switch (r) {
    case FilterResponse::Lowpass: return "lowpass";
    case FilterResponse::Highpass: return "highpass";
    case FilterResponse::Bandpass: return "bandpass";
    case FilterResponse::Bandstop: return "bandstop";
  }
  return "?";
}

Zpk design_iir(const FilterDesign& d) {
  validate(d);
  Zpk proto;
  switch (d.family) {
    case FilterFamily::Butterworth: proto = buttap(d.order); break;
    case FilterFamily::Chebyshev1: proto = cheb1ap(d.order, d.ripple_db.value_or(kDefaultRippleDb)); break;
    case FilterFamily::Chebyshev2:
      proto = cheb2ap(d.order, d.attenuation_db.value_or(kDefaultAttenuationDb));
      break;
  }
  // Sampling rate 2 so cutoffs are fractions of Nyquist; prewarp the edges.
  const double fs = 2.0;
  std::vector<double> warped;
  for (double c : d.cutoffs) warped.push_back(2.0 * fs * std::tan(M_PI * c / fs));
  Zpk analog;
  switch (d.response) {
    case FilterResponse::Lowpass: analog = lp2lp(proto, warped[0]); break;
    case FilterResponse::Highpass: analog = lp2hp(proto, warped[0]); break;
    case FilterResponse::Bandpass:
      analog = lp2bp(proto, std::sqrt(warped[0] * warped[1]), warped[1] - warped[0]);
      break;
    case FilterResponse::Bandstop:
      analog = lp2bs(proto, std::sqrt(warped[0] * warped[1]), warped[1] - warped[0]);
      break;
  }
  return bilinear(analog, fs);
}

std::complex<double> frequency_response(const Zpk& zpk, double f) {
  const cplx z = std::exp(cplx{0.0, M_PI * f});
  cplx h{zpk.gain, 0.0};
  for (const auto& zero : zpk.zeros) h *= z - zero;
  for (const auto& pole : zpk.poles) h /= z - pole;
  return h;
}

FilterMetrics design_filter(const FilterDesign& design, int grid_points) {
  if (grid_points < 1024) throw ValidationError("frequency grid needs at least 1024 points");
  const Zpk zpk = design_iir(design);
  const auto n = static_cast<std::size_t>(grid_points) + 1;
  std::vector<double> f(n), gain_db(n), phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = static_cast<double>(i) / grid_points;
    const cplx h = frequency_response(zpk, f[i]);
    const double mag = std::abs(h);
    gain_db[i] = mag > 0.0 ? std::max(kDbFloor, 20.0 * std::log10(mag)) : kDbFloor;
    phase[i] = std::arg(h);
  }
  for (std::size_t i = 1; i < n; ++i) {
    double d = phase[i] - phase[i - 1];
    d -= 2.0 * M_PI * std::round(d / (2.0 * M_PI));
    phase[i] = phase[i - 1] + d;
  }

  const BandMasks masks = band_masks(design);
  FilterMetrics out;

  double pass_max = -1e300, pass_min = 1e300, stop_max = -1e300;
  double gd_max = -1e300, gd_min = 1e300;
  const double dw = M_PI / grid_points;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_any(masks.pass, f[i])) {
      pass_max = std::max(pass_max, gain_db[i]);
      pass_min = std::min(pass_min, gain_db[i]);
      if (i > 0 && i + 1 < n) {
        const double gd = -(phase[i + 1] - phase[i - 1]) / (2.0 * dw);
        gd_max = std::max(gd_max, gd);
        gd_min = std::min(gd_min, gd);
      }
    }
    if (in_any(masks.stop, f[i])) stop_max = std::max(stop_max, gain_db[i]);
  }
  out.passband_ripple_db = pass_max >= pass_min ? pass_max - pass_min : 0.0;
  out.stopband_attenuation_db = stop_max > -1e300 ? -stop_max : -kDbFloor;
  out.group_delay_variation = gd_max >= gd_min ? gd_max - gd_min : 0.0;

  // -3 dB crossing nearest the first design edge.
  const double edge = design.cutoffs.front();
  double best = design.cutoffs.front();
  std::size_t best_index = static_cast<std::size_t>(std::lround(edge * grid_points));
  double best_dist = 1e300;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = gain_db[i] - kMinus3Db;
    const double b = gain_db[i + 1] - kMinus3Db;
    if ((a > 0.0) == (b > 0.0)) continue;
    const double fc = f[i] + (f[i + 1] - f[i]) * a / (a - b);
    if (std::abs(fc - edge) < best_dist) {
      best_dist = std::abs(fc - edge);
      best = fc;
      best_index = masks.stop_above ? i + 1 : i;
    }
  }
  out.cutoff_minus3db = best;

  // Walk from the -3 dB point towards the stopband until the attenuation
  // reaches min(20 dB, measured stopband attenuation).
  const double reference = -std::min(kTransitionReferenceDb, out.stopband_attenuation_db);
  double reached = masks.stop_above ? 1.0 : 0.0;
  if (masks.stop_above) {
    for (std::size_t i = best_index; i < n; ++i) {
      if (gain_db[i] <= reference) { reached = f[i]; break; }
    }
  } else {
    for (std::size_t i = best_index + 1; i-- > 0;) {
      if (gain_db[i] <= reference) { reached = f[i]; break; }
    }
  }
  out.transition_bandwidth = std::abs(reached - out.cutoff_minus3db);
  return out;
}

}  // namespace invdes::oracles
