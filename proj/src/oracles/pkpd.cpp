#include "invdes/oracles/pkpd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "invdes/model.hpp"

namespace invdes::oracles {

namespace {

constexpr double kHalfLifeFactor = 0.693;
constexpr int kMaxSteadyStateDoses = 2000;
constexpr double kSteadyStateRelChange = 1e-7;

// gut, central, peripheral amounts (mg) and running AUC of concentration.
using State = std::array<double, 4>;

struct Rates {
  double ka, ke, k12, k21, inv_v;

  State derivative(const State& s) const {
    const double absorbed = ka * s[0];
    return {-absorbed, absorbed - ke * s[1] - k12 * s[1] + k21 * s[2], k12 * s[1] - k21 * s[2],
            s[1] * inv_v};
  }
};

State rk4(const Rates& r, const State& s, double h) {
  auto axpy = [](const State& a, const State& b, double c) {
    State o;
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] + c * b[i];
    return o;
  };
  const State k1 = r.derivative(s);
  const State k2 = r.derivative(axpy(s, k1, h / 2));
  const State k3 = r.derivative(axpy(s, k2, h / 2));
  const State k4 = r.derivative(axpy(s, k3, h));
  State o;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = s[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return o;
}

struct IntervalStats {
  double cmax = 0.0;
  double cmin = std::numeric_limits<double>::infinity();
  double auc = 0.0;
};

}  // namespace

bool allowed_dosing_frequency(double hours) {
  for (double f : {4.0, 6.0, 8.0, 12.0, 24.0}) {
    if (hours == f) return true;
  }
  return false;
}

PkOutcome simulate_pkpd(const DosingDesign& d, const PkParameters& pk, PkWindow window) {
  if (!(d.dose_mg >= 0.0) || !std::isfinite(d.dose_mg)) throw ValidationError("dose_mg must be >= 0");
  if (!allowed_dosing_frequency(d.frequency_hours)) {
    throw ValidationError("frequency_hours must be one of 4, 6, 8, 12, 24");
  }
  if (!(pk.ka > 0.0 && pk.F > 0.0 && pk.F <= 1.0 && pk.CL > 0.0 && pk.V > 0.0)) {
    throw ValidationError("PK parameters must be positive (F in (0, 1])");
  }
  if (pk.k12.has_value() != pk.k21.has_value()) {
    throw ValidationError("two-compartment model needs both k12 and k21");
  }
  if (pk.k12 && !(*pk.k12 > 0.0 && *pk.k21 > 0.0)) {
    throw ValidationError("k12 and k21 must be positive");
  }

  const Rates rates{pk.ka, pk.CL / pk.V, pk.k12.value_or(0.0), pk.k21.value_or(0.0), 1.0 / pk.V};
  // A grid of 12/(6m) hr divides every allowed interval and the window start.
  const double h0 = std::min(0.02 / pk.ka, 0.05);
  const int per_12h = 6 * static_cast<int>(std::ceil(12.0 / (6.0 * h0)));
  const double h = 12.0 / per_12h;
  const int per_interval = static_cast<int>(std::lround(d.frequency_hours / h));

  PkOutcome out;
  out.half_life_hr = kHalfLifeFactor * pk.V / pk.CL;
  out.step_hr = h;

  State s{0.0, 0.0, 0.0, 0.0};
  const double amount = pk.F * d.dose_mg;
  auto run_interval = [&](IntervalStats* stats) {
    s[0] += amount;
    if (stats) {
      const double c = s[1] / pk.V;
      stats->cmax = std::max(stats->cmax, c);
      stats->cmin = std::min(stats->cmin, c);
    }
    for (int k = 0; k < per_interval; ++k) {
      s = rk4(rates, s, h);
      if (stats) {
        const double c = std::max(0.0, s[1] / pk.V);
        stats->cmax = std::max(stats->cmax, c);
        stats->cmin = std::min(stats->cmin, c);
      }
    }
  };

  const int doses_per_window = static_cast<int>(std::lround(kMetricWindowHr / d.frequency_hours));
  if (window == PkWindow::Treatment) {
    const int lead_steps = static_cast<int>(std::lround(kTreatmentWindowStartHr / h));
    int step = 0;
    IntervalStats stats;
    double auc_start = 0.0;
    const int total_steps = lead_steps + static_cast<int>(std::lround(kMetricWindowHr / h));
    for (; step < total_steps; ++step) {
      if (step % per_interval == 0) s[0] += amount;
      if (step == lead_steps) auc_start = s[3];
      if (step >= lead_steps) {
        const double c = s[1] / pk.V;
        stats.cmax = std::max(stats.cmax, c);
        stats.cmin = std::min(stats.cmin, c);
      }
      s = rk4(rates, s, h);
    }
    const double c_end = std::max(0.0, s[1] / pk.V);
    stats.cmax = std::max(stats.cmax, c_end);
    stats.cmin = std::min(stats.cmin, c_end);
    out.window_start_hr = kTreatmentWindowStartHr;
    out.cmax_mg_L = std::max(0.0, stats.cmax);
    out.cmin_mg_L = std::max(0.0, stats.cmin);
    out.auc_0_24 = std::max(0.0, s[3] - auc_start);
    return out;
  }

  // Steady state: repeat 24 h blocks until the block AUC stops changing.
  double previous_auc = -1.0;
  IntervalStats last;
  int doses = 0;
  while (doses < kMaxSteadyStateDoses) {
    IntervalStats block;
    const double auc_before = s[3];
    for (int k = 0; k < doses_per_window; ++k) run_interval(&block);
    doses += doses_per_window;
    block.auc = s[3] - auc_before;
    last = block;
    if (previous_auc >= 0.0 &&
        std::abs(block.auc - previous_auc) <= kSteadyStateRelChange * std::max(block.auc, 1e-300)) {
      break;
    }
    previous_auc = block.auc;
  }
  out.window_start_hr = static_cast<double>(doses - doses_per_window) * d.frequency_hours;
  out.cmax_mg_L = std::max(0.0, last.cmax);
  out.cmin_mg_L = std::max(0.0, std::isfinite(last.cmin) ? last.cmin : 0.0);
  out.auc_0_24 = std::max(0.0, last.auc);
  return out;
}

}  // namespace invdes::oracles
