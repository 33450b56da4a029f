#pragma once

// Forward goal generation: sample a design, run the oracle, turn the outcome
// into targets. Tasks are deterministic in (domain, level, kind, seed).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "invdes/model.hpp"

namespace invdes {

struct SeedRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;  // exclusive
  bool contains(std::uint64_t s) const { return s >= lo && s < hi; }
};

inline constexpr SeedRange kBenchmarkSeeds{0, 100'000};
inline constexpr SeedRange kHoldoutSeeds{100'000, 200'000};
inline constexpr SeedRange kTrainingSeeds{200'000, 10'000'000};

inline constexpr int kTasksPerLevel = 5;
inline constexpr int kMaxGenerationRetries = 200;
inline constexpr double kMaxJitterFraction = 0.25;

struct GeneratedTask {
  TaskRecord record;
  Design generating_design;  // hidden; never part of the public record
  Outcome generating_outcome;
};

/// Builds one task. Retries with derived sub-seeds when a sampled design
/// fails validation, the oracle throws, or the outcome is unusable; throws
/// std::runtime_error after kMaxGenerationRetries.
GeneratedTask forward_generate_goal(const std::string& domain, Level level, TaskKind kind,
                                    std::uint64_t seed);

/// Multiplies each exact target by (1 + u), u ~ U[-fraction, fraction].
Goal jitter_goal(const Goal& goal, double fraction, std::uint64_t seed);

std::string task_id(const std::string& domain, TaskKind kind, Level level, int index);

struct ManifestEntry {
  std::string task_id;
  std::string domain;
  Level level = Level::L1;
  TaskKind kind = TaskKind::DeNovo;
  std::uint64_t seed = 0;
};

struct Manifest {
  std::string version;
  std::vector<std::string> domains;
  std::vector<ManifestEntry> entries;
  std::vector<TaskRecord> tasks;                     // same order as entries
  std::map<std::string, Design> generating_designs;  // task_id -> hidden design
};

/// Benchmark seed for a task slot; distinct slots map to distinct seeds.
std::uint64_t benchmark_seed(std::size_t domain_index, TaskKind kind, Level level, int index);

/// Generates every task in memory: for each domain, both kinds, 5 tasks per level.
Manifest build_manifest(const std::vector<std::string>& domains, const std::string& version);

json manifest_to_json(const Manifest& m);  // public part only
json hidden_to_json(const Manifest& m);
Manifest manifest_from_json(const json& j);
std::map<std::string, Design> hidden_from_json(const json& j);

struct ManifestPaths {
  std::filesystem::path manifest;  // <root>/<version>/manifest.json
  std::filesystem::path hidden;    // <root>/<version>.hidden/generating_designs.json
};
ManifestPaths manifest_paths(const std::filesystem::path& root, const std::string& version);

/// Thrown when freezing would overwrite an existing version.
class ImmutableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds and writes the manifest plus its hidden sidecar.
Manifest freeze_manifest(const std::vector<std::string>& domains, const std::string& version,
                         const std::filesystem::path& root);

Manifest load_manifest(const std::filesystem::path& manifest_file);
/// Sidecar next to a manifest loaded from `manifest_file`; empty if absent.
std::map<std::string, Design> load_hidden_designs(const std::filesystem::path& manifest_file);

}  // namespace invdes
