#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace invdes::oracles {

struct SsaSpecies {
  std::string name;
  long long initial_count = 0;
};

struct SsaReaction {
  std::map<std::string, int> reactants;
  std::map<std::string, int> products;
  double rate_constant = 0.0;
};

struct SsaNetworkDesign {
  std::vector<SsaSpecies> species;
  std::vector<SsaReaction> reactions;
};

inline constexpr std::size_t kMaxSpecies = 8;
inline constexpr std::size_t kMaxReactions = 16;
inline constexpr int kMaxReactionOrder = 2;

struct SsaConfig {
  double t_end_s = 200.0;
  int n_runs = 1000;
  std::uint64_t seed = 0;
  // Events per run; a run that hits the cap holds its state to t_end.
  std::size_t max_events = 1'000'000;
  int acf_grid = 64;
};

struct SsaOutcome {
  std::vector<double> mean;      // per species, end-window time average
  std::vector<double> variance;  // per species, pooled over runs and time
  double oscillation_score = 0.0;  // reporter = species 0
  std::size_t capped_runs = 0;
  std::size_t total_events = 0;
};

/// Structural checks; empty when the network is well formed.
std::vector<std::string> network_errors(const SsaNetworkDesign& design);

/// Repeated Gillespie direct-method runs. Statistics use the window
/// [t_end/2, t_end]. Run r draws from a stream keyed by (seed, r).
SsaOutcome simulate_ssa(const SsaNetworkDesign& design, const SsaConfig& config);

}  // namespace invdes::oracles
