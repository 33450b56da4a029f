#include "invdes/oracles/controls.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <complex>

#include "invdes/model.hpp"

namespace invdes::oracles {

namespace {

constexpr std::size_t kMaxSteps = 200000;

Poly trim(Poly p) {
  std::size_t lead = 0;
  while (lead + 1 < p.size() && p[lead] == 0.0) ++lead;
  p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(lead));
  if (p.empty()) p.push_back(0.0);
  return p;
}

std::size_t degree(const Poly& p) { return trim(p).size() - 1; }

std::vector<std::complex<double>> roots(const Poly& p_in) {
  const Poly p = trim(p_in);
  const std::size_t n = p.size() - 1;
  if (n == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) companion(0, static_cast<Eigen::Index>(j)) = -p[j + 1] / p[0];
  for (std::size_t i = 1; i < n; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()(k));
  return out;
}

StepMetrics sentinel(StepMetrics m) {
  m.stable = false;
  m.overshoot_pct = kUnstableSentinel;
  m.settling_time_s = kUnstableSentinel;
  m.rise_time_s = kUnstableSentinel;
  m.steady_state_error = kUnstableSentinel;
  return m;
}

// Linear interpolation of the time at which the sampled signal crosses level
// between samples k-1 and k.
double crossing_time(double t0, double y0, double t1, double y1, double level) {
  if (y1 == y0) return t1;
  return t0 + (level - y0) * (t1 - t0) / (y1 - y0);
}

}  // namespace

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  const std::size_t oa = out.size() - a.size();
  const std::size_t ob = out.size() - b.size();
  for (std::size_t i = 0; i < a.size(); ++i) out[oa + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[ob + i] += b[i];
  return out;
}

double poly_eval(const Poly& p, double s) {
  double acc = 0.0;
  for (double c : p) acc = acc * s + c;
  return acc;
}

TransferFunction closed_loop(const PidDesign& pid, const TransferFunction& plant) {
  if (plant.den.empty() || plant.den.front() == 0.0) {
    throw ValidationError("plant denominator has a zero leading coefficient");
  }
  if (plant.num.empty()) throw ValidationError("plant numerator is empty");
  if (degree(plant.num) > degree(plant.den)) throw ValidationError("plant is improper");
  if (pid.kp < 0.0 || pid.ki < 0.0 || pid.kd < 0.0) throw ValidationError("PID gains must be >= 0");
  if (pid.filter_n && !(*pid.filter_n > 0.0)) throw ValidationError("filter N must be positive");

  // Controller as a sum of fractions; only the terms that are present enter
  // so a pure P controller adds no spurious pole/zero pair.
  TransferFunction c{{pid.kp}, {1.0}};
  auto add_term = [&c](const Poly& n, const Poly& d) {
    c.num = poly_add(poly_mul(c.num, d), poly_mul(n, c.den));
    c.den = poly_mul(c.den, d);
  };
  if (pid.ki > 0.0) add_term({pid.ki}, {1.0, 0.0});
  if (pid.kd > 0.0) {
    if (pid.filter_n) {
      add_term({pid.kd * *pid.filter_n, 0.0}, {1.0, *pid.filter_n});
    } else {
      add_term({pid.kd, 0.0}, {1.0});
    }
  }
  TransferFunction open{trim(poly_mul(c.num, plant.num)), trim(poly_mul(c.den, plant.den))};
  TransferFunction loop{open.num, trim(poly_add(open.den, open.num))};
  if (degree(loop.num) > degree(loop.den)) {
    throw ValidationError("closed loop is improper (add a derivative filter)");
  }
  return loop;
}

StepMetrics step_metrics(const TransferFunction& tf_in) {
  StepMetrics m;
  const Poly den = trim(tf_in.den);
  Poly num = trim(tf_in.num);
  const std::size_t n = den.size() - 1;
  if (n == 0) return sentinel(m);

  const auto poles = roots(den);
  double slowest = std::numeric_limits<double>::infinity();
  double fastest = 0.0;
  double max_imag = 0.0;
  for (const auto& p : poles) {
    if (!(p.real() < -1e-9)) return sentinel(m);
    slowest = std::min(slowest, -p.real());
    fastest = std::max(fastest, -p.real());
    max_imag = std::max(max_imag, std::abs(p.imag()));
  }
  const double final_value = poly_eval(num, 0.0) / poly_eval(den, 0.0);
  if (!std::isfinite(final_value) || std::abs(final_value) < 1e-9) return sentinel(m);

  const double tau = 1.0 / slowest;
  m.horizon_s = 50.0 * tau;
  double h = tau / 200.0;
  if (max_imag > 0.0) h = std::min(h, 2.0 * M_PI / max_imag / 40.0);
  h = std::min(h, 0.2 / fastest);
  h = std::max(h, m.horizon_s / static_cast<double>(kMaxSteps));
  m.step_s = h;

  // Controllable canonical realization of num/den (den made monic).
  const double lead = den[0];
  std::vector<double> a(n), b(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i] = den[i + 1] / lead;
  for (std::size_t i = 0; i < num.size(); ++i) b[n + 1 - num.size() + i] = num[i] / lead;
  const double d = b[0];
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (Eigen::Index j = 0; j < N; ++j) aug(0, j) = -a[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < N; ++i) aug(i, i - 1) = 1.0;
  aug(0, N) = 1.0;  // B = e_0
  Eigen::RowVectorXd c_row(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    c_row(j) = b[static_cast<std::size_t>(j) + 1] - d * a[static_cast<std::size_t>(j)];
  }
  // exp([[A, B], [0, 0]] h) = [[Phi, Gamma], [0, 1]] gives the exact step update.
  const Eigen::MatrixXd e = (aug * h).exp();
  const Eigen::MatrixXd phi = e.topLeftCorner(N, N);
  const Eigen::VectorXd gamma = e.topRightCorner(N, 1);

  const auto steps = static_cast<std::size_t>(std::ceil(m.horizon_s / h));
  const double sign = final_value > 0.0 ? 1.0 : -1.0;
  const double target = std::abs(final_value);
  const double band = 0.02 * target;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  double peak = -std::numeric_limits<double>::infinity();
  double t_prev = 0.0;
  double y_prev = sign * d;  // response immediately after the step
  double t10 = y_prev >= 0.1 * target ? 0.0 : -1.0;
  double t90 = y_prev >= 0.9 * target ? 0.0 : -1.0;
  double settle = std::abs(y_prev - target) > band ? -1.0 : 0.0;
  double last_outside = std::abs(y_prev - target) > band ? 0.0 : -1.0;
  peak = y_prev;
  for (std::size_t k = 1; k <= steps; ++k) {
    x = phi * x + gamma;
    const double t = static_cast<double>(k) * h;
    const double y = sign * (c_row.dot(x) + d);
    if (!std::isfinite(y)) return sentinel(m);
    peak = std::max(peak, y);
    if (t10 < 0.0 && y >= 0.1 * target) t10 = crossing_time(t_prev, y_prev, t, y, 0.1 * target);
    if (t90 < 0.0 && y >= 0.9 * target) t90 = crossing_time(t_prev, y_prev, t, y, 0.9 * target);
    const bool outside = std::abs(y - target) > band;
    const bool was_outside = std::abs(y_prev - target) > band;
    if (outside) {
      last_outside = t;
    } else if (was_outside) {
      const double level = y_prev > target ? target + band : target - band;
      settle = crossing_time(t_prev, y_prev, t, y, level);
    }
    t_prev = t;
    y_prev = y;
  }
  m.stable = true;
  m.overshoot_pct = std::max(0.0, (peak - target) / target * 100.0);
  m.rise_time_s = (t10 >= 0.0 && t90 >= 0.0) ? std::max(0.0, t90 - t10) : m.horizon_s;
  m.settling_time_s = last_outside < 0.0 ? 0.0 : std::max(settle, 0.0);
  if (last_outside >= t_prev) m.settling_time_s = m.horizon_s;
  m.steady_state_error = std::abs(1.0 - final_value);
  return m;
}

StepMetrics simulate_controls(const PidDesign& pid, const TransferFunction& plant) {
  return step_metrics(closed_loop(pid, plant));
}

}  // namespace invdes::oracles
