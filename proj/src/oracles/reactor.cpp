#include "invdes/oracles/reactor.hpp"

#include <cmath>

#include "invdes/model.hpp"

namespace invdes::oracles {

ReactionSystem reaction_system_from_string(const std::string& s) {
  if (s == "single") return ReactionSystem::Single;
  if (s == "series") return ReactionSystem::Series;
  if (s == "parallel") return ReactionSystem::Parallel;
  throw ValidationError("unknown reaction system '" + s + "'");
}

std::string to_string(ReactionSystem s) {
  switch (s) {
    case ReactionSystem::Single: return "single";
    case ReactionSystem::Series: return "series";
    case ReactionSystem::Parallel: return "parallel";
  }
  return "?";
}

ReactorOutcome simulate_reactor(const ReactorDesign& d, const ReactorKinetics& kin) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
  };
  positive(d.volume_L, "volume_L");
  positive(d.flow_L_per_s, "flow_L_per_s");
  positive(d.feed_conc_mol_L, "feed_conc_mol_L");
  positive(d.temperature_K, "temperature_K");
  positive(d.coolant_K, "coolant_K");
  if (kin.pre_exp_1 < 0.0 || kin.pre_exp_2 < 0.0 || kin.ua_over_rho_cp_L_s < 0.0) {
    throw ValidationError("kinetic constants must be non-negative");
  }

  ReactorOutcome out;
  const double kappa = kin.ua_over_rho_cp_L_s / d.flow_L_per_s;
  out.reactor_temperature_K = (d.temperature_K + kappa * d.coolant_K) / (1.0 + kappa);
  const double rt = kGasConstant * out.reactor_temperature_K;
  out.k1 = kin.pre_exp_1 * std::exp(-kin.activation_1_J_mol / rt);
  out.k2 = kin.system == ReactionSystem::Single
               ? 0.0
               : kin.pre_exp_2 * std::exp(-kin.activation_2_J_mol / rt);

  const double tau = d.volume_L / d.flow_L_per_s;
  const double c0 = d.feed_conc_mol_L;
  const double a1 = out.k1 * tau;
  const double a2 = out.k2 * tau;
  switch (kin.system) {
    case ReactionSystem::Single:
      out.conc_A = c0 / (1.0 + a1);
      out.conc_B = c0 * a1 / (1.0 + a1);
      out.conc_C = 0.0;
      out.selectivity = 1.0;
      break;
    case ReactionSystem::Series:
      out.conc_A = c0 / (1.0 + a1);
      out.conc_B = c0 * a1 / ((1.0 + a1) * (1.0 + a2));
      out.conc_C = c0 * a1 * a2 / ((1.0 + a1) * (1.0 + a2));
      // B / (B + C) in closed form so it stays defined as conversion -> 0.
      out.selectivity = 1.0 / (1.0 + a2);
      break;
    case ReactionSystem::Parallel:
      out.conc_A = c0 / (1.0 + a1 + a2);
      out.conc_B = a1 * out.conc_A;
      out.conc_C = a2 * out.conc_A;
      out.selectivity = (out.k1 + out.k2) > 0.0 ? out.k1 / (out.k1 + out.k2) : 0.0;
      break;
  }
  out.conversion = (a1 + (kin.system == ReactionSystem::Parallel ? a2 : 0.0)) /
                   (1.0 + a1 + (kin.system == ReactionSystem::Parallel ? a2 : 0.0));
  out.yield = out.conc_B / c0;
  out.productivity = d.flow_L_per_s * out.conc_B;
  return out;
}

}  // namespace invdes::oracles
