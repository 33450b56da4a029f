#pragma once

#include <optional>
#include <vector>

namespace invdes::oracles {

/// Polynomial coefficients in descending powers of s.
using Poly = std::vector<double>;

struct TransferFunction {
  Poly num;
  Poly den;
};

struct PidDesign {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  std::optional<double> filter_n;  // derivative filter N: Kd*N*s/(s+N)
};

struct StepMetrics {
  bool stable = false;
  double overshoot_pct = 0.0;
  double settling_time_s = 0.0;
  double rise_time_s = 0.0;
  double steady_state_error = 0.0;
  double horizon_s = 0.0;
  double step_s = 0.0;
};

/// Finite stand-in reported for every metric of an unstable or degenerate loop.
inline constexpr double kUnstableSentinel = 1e6;

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
double poly_eval(const Poly& p, double s);

/// Unity-feedback loop with the PID in series with the plant.
TransferFunction closed_loop(const PidDesign& pid, const TransferFunction& plant);

/// Unit-step response of the closed loop, sampled exactly (zero-order hold of
/// a step is exact) and reduced to overshoot / settling / rise / offset.
StepMetrics simulate_controls(const PidDesign& pid, const TransferFunction& plant);

/// Step metrics of an arbitrary proper, stable transfer function.
StepMetrics step_metrics(const TransferFunction& tf);

}  // namespace invdes::oracles
