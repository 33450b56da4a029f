#pragma once

// Per-task calibration: a deterministic sweep, repeated random search under a
// fixed budget, and hidden-design replay.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invdes/model.hpp"

namespace invdes {

inline constexpr int kCalibrationSchemaVersion = 1;

struct CalibrationConfig {
  int budget = 20;
  int n_trials = 16;
  int sweep_points = 64;
  std::uint64_t seed = 0;

  void check() const;  // throws ContractError
};

struct CalibrationArtifact {
  std::string task_id;
  std::uint64_t seed = 0;
  int budget = 0;
  int sweep_points = 0;
  double baseline_hit_rate = 0.0;
  std::vector<double> random_search_rewards;  // best reward per trial
  std::vector<bool> random_search_success;    // per trial
  std::optional<bool> replay_success;         // unset without a sidecar
  bool solvable = false;
  std::string difficulty_bucket;  // easy | medium | hard | extreme
  std::vector<std::string> warnings;

  double random_search_success_rate() const;
  double mean_random_search_reward() const;
};

/// easy: sweep hit rate > 0.1; medium: random-search success >= 0.25;
/// hard: > 0; extreme: no probe succeeded.
std::string difficulty_bucket(double sweep_hit_rate, double random_success_rate, bool any_probe_success);

CalibrationArtifact calibrate_task(const TaskRecord& task, const std::optional<Design>& hidden,
                                   const CalibrationConfig& config = {});

/// Calibrates tasks on `jobs` workers; output order follows `tasks`.
std::vector<CalibrationArtifact> calibrate_tasks(const std::vector<TaskRecord>& tasks,
                                                 const std::map<std::string, Design>& hidden,
                                                 const CalibrationConfig& config = {}, int jobs = 1);

/// Mean random-search best reward per level for one domain.
struct LevelProfile {
  std::string domain;
  std::array<double, 4> mean_best_reward{};
  std::array<int, 4> n_tasks{};
  bool non_increasing() const;  // over the levels that have tasks
};

/// One profile per domain present in `tasks`, in canonical domain order.
std::vector<LevelProfile> level_profiles(const std::vector<TaskRecord>& tasks,
                                         const std::vector<CalibrationArtifact>& artifacts);

json to_json(const CalibrationArtifact& a);
CalibrationArtifact calibration_from_json(const json& j);

/// <manifest dir>/calibration-seed<seed>
std::filesystem::path calibration_dir(const std::filesystem::path& manifest_file, std::uint64_t seed);

/// Writes <dir>/<task_id>.json. Returns false when an identical file already
/// exists; throws ImmutableError when a different one does.
bool write_calibration(const std::filesystem::path& dir, const CalibrationArtifact& a);

}  // namespace invdes
