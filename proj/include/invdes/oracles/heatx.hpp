#pragma once

namespace invdes::oracles {

struct HeatExchangerDesign {
  int n_tubes = 0;
  double tube_length_m = 0.0;
  double tube_id_m = 0.0;
  double tube_od_m = 0.0;
  double baffle_spacing_m = 0.0;
  int n_passes = 1;  // tube passes: 1, 2 or 4
};

struct StreamSpec {
  double mass_flow_kg_s = 0.0;
  double inlet_K = 0.0;
  double cp_J_kgK = 0.0;
  double viscosity_Pa_s = 0.0;
  double conductivity_W_mK = 0.0;
};

/// Hot stream runs in the tubes, cold stream on the shell side.
struct HeatExchangerConfig {
  StreamSpec hot;
  StreamSpec cold;
  double wall_conductivity_W_mK = 16.0;
  double shell_clearance_m = 0.015;
};

struct HeatExchangerOutcome {
  double duty_W = 0.0;
  double hot_out_K = 0.0;
  double cold_out_K = 0.0;
  double effectiveness = 0.0;
  double lmtd_K = 0.0;  // effective (pass-corrected) mean temperature difference
  double U_W_m2K = 0.0;
  double area_m2 = 0.0;
  double ntu = 0.0;
  double c_ratio = 0.0;
  double h_tube = 0.0;
  double h_shell = 0.0;
};

/// Effectiveness of a counterflow exchanger (n_passes == 1) or a one-shell,
/// even-tube-pass exchanger.
double effectiveness_ntu(double ntu, double c_ratio, int n_passes);

/// Log-mean temperature difference for counterflow terminal differences.
double lmtd_counterflow(double dt1, double dt2);

/// Bowman correction factor for one shell pass and an even number of tube
/// passes, from the capacity ratio R and thermal effectiveness P.
double lmtd_correction_1_2(double R, double P);

HeatExchangerOutcome simulate_heatx(const HeatExchangerDesign& design,
                                    const HeatExchangerConfig& config);

}  // namespace invdes::oracles
