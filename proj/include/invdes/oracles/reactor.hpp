#pragma once

#include <string>

namespace invdes::oracles {

enum class ReactionSystem { Single, Series, Parallel };

struct ReactorDesign {
  double volume_L = 0.0;
  double flow_L_per_s = 0.0;
  double feed_conc_mol_L = 0.0;
  double temperature_K = 0.0;  // feed temperature
  double coolant_K = 0.0;
};

/// Kinetics and jacket of one task. Rate constants are A * exp(-E / (R T)) in
/// 1/s. Series: A -> B -> C; parallel: A -> B, A -> C; single: A -> B.
struct ReactorKinetics {
  ReactionSystem system = ReactionSystem::Series;
  double pre_exp_1 = 0.0;
  double activation_1_J_mol = 0.0;
  double pre_exp_2 = 0.0;
  double activation_2_J_mol = 0.0;
  double ua_over_rho_cp_L_s = 0.0;  // jacket coupling; 0 = no coolant effect
};

inline constexpr double kGasConstant = 8.314462618;

struct ReactorOutcome {
  double reactor_temperature_K = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double conc_A = 0.0;
  double conc_B = 0.0;
  double conc_C = 0.0;
  double conversion = 0.0;
  double selectivity = 0.0;   // B formed per A consumed
  double yield = 0.0;         // c_B / c_0
  double productivity = 0.0;  // mol B per second leaving the reactor
};

ReactionSystem reaction_system_from_string(const std::string& s);
std::string to_string(ReactionSystem s);

/// Steady-state isothermal CSTR. The reactor temperature mixes the feed and
/// coolant temperatures through the jacket coupling; heat of reaction is
/// neglected.
ReactorOutcome simulate_reactor(const ReactorDesign& design, const ReactorKinetics& kinetics);

}  // namespace invdes::oracles
