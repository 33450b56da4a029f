#pragma once

#include <map>
#include <string>

namespace invdes::oracles {

struct ElementProps {
  double density_g_cc = 0.0;
  double melting_K = 0.0;
  double strength_MPa = 0.0;
  double ss_coeff_MPa = 0.0;
  double cost_per_kg = 0.0;
};

struct AlloyTable {
  std::map<std::string, ElementProps> elements;
  double melting_depression_fraction = 0.25;
};

/// Bundled 10-element table.
const AlloyTable& alloy_table();

struct AlloyDesign {
  std::map<std::string, double> composition;  // element -> fraction
  double processing_temp_K = 0.0;
};

struct AlloyOutcome {
  double yield_strength_MPa = 0.0;
  double density_g_cc = 0.0;
  double melting_point_K = 0.0;
  double cost_per_kg = 0.0;
  std::string base_element;
};

inline constexpr double kCompositionSumTolerance = 1e-6;

/// Rule-of-mixtures properties. Melting point carries a pairwise depression
/// f * sum_{i<j} 2 x_i x_j min(Tm_i, Tm_j). Yield strength adds solid-solution
/// strengthening sum_{i != base} k_i sqrt(x_i), scaled by the processing
/// factor 1 - exp(-T_proc / (0.4 Tm_alloy)); the base is the majority element.
AlloyOutcome evaluate_alloy(const AlloyDesign& design, const AlloyTable& table = alloy_table());

}  // namespace invdes::oracles
