#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace invdes::oracles {

struct GrnEdge {
  std::string source;
  std::string target;
  double weight = 0.0;
};

struct GrnModel {
  std::vector<std::string> genes;
  std::map<std::string, std::vector<std::string>> pathways;
  std::vector<GrnEdge> edges;
  double noise_scale = 0.05;
  double knockout_log2_floor = -5.0;

  std::size_t index_of(const std::string& gene) const;  // throws ValidationError
  bool has_gene(const std::string& gene) const;
  /// Dense row-major W with W[target][source] = weight.
  std::vector<double> dense_weights() const;
};

/// Bundled 51-gene network.
const GrnModel& grn_model();

struct KnockoutDesign {
  std::string gene;
};

/// Log2 fold-change of every gene after the knockout, without noise:
/// the fixed point of d = W d with the knocked-out gene clamped to the floor.
std::vector<double> knockout_fixed_point(const GrnModel& model, std::size_t knocked_out);

/// Fold-changes of the requested markers with deterministic uniform noise in
/// [-noise_scale, noise_scale] keyed by (seed, marker). The knocked-out gene
/// itself reports the floor exactly. Pass noise_scale < 0 to use the model's.
std::map<std::string, double> simulate_knockout(const KnockoutDesign& design,
                                                const GrnModel& model,
                                                const std::vector<std::string>& markers,
                                                std::uint64_t seed, double noise_scale = -1.0);

}  // namespace invdes::oracles
