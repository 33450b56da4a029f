#pragma once

#include <optional>

namespace invdes::oracles {

struct DosingDesign {
  double dose_mg = 0.0;
  double frequency_hours = 12.0;  // one of 4, 6, 8, 12, 24
};

struct PkParameters {
  double ka = 1.0;  // 1/hr
  double F = 1.0;   // bioavailability
  double CL = 1.0;  // L/hr
  double V = 1.0;   // L
  std::optional<double> k12;  // central -> peripheral, 1/hr
  std::optional<double> k21;  // peripheral -> central, 1/hr
};

/// Where the 24 h metric window sits.
enum class PkWindow {
  // Doses from t = 0, window [12 h, 36 h): the second and third half-days of
  // therapy. This is the default reporting window.
  Treatment,
  // Dose until successive dosing intervals agree, then report the last 24 h.
  SteadyState,
};

struct PkOutcome {
  double cmax_mg_L = 0.0;
  double cmin_mg_L = 0.0;
  double auc_0_24 = 0.0;  // mg*h/L over the 24 h window
  double half_life_hr = 0.0;
  double window_start_hr = 0.0;
  double step_hr = 0.0;
};

inline constexpr double kTreatmentWindowStartHr = 12.0;
inline constexpr double kMetricWindowHr = 24.0;

bool allowed_dosing_frequency(double hours);

/// Oral dosing into a gut compartment feeding a central compartment (and an
/// optional peripheral one), integrated with fixed-step RK4 at
/// min(0.02/ka, 0.05) hr refined to land on dose times.
PkOutcome simulate_pkpd(const DosingDesign& design, const PkParameters& pk,
                        PkWindow window = PkWindow::Treatment);

}  // namespace invdes::oracles
