#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "invdes/calibration.hpp"
#include "invdes/taskgen.hpp"

using namespace invdes;
namespace fs = std::filesystem;

namespace {

GeneratedTask task(const std::string& dom, Level l = Level::L1, std::uint64_t seed = 12) {
  auto g = forward_generate_goal(dom, l, TaskKind::DeNovo, seed);
  g.record.task_id = dom + "-t" + std::to_string(seed);
  return g;
}

}  // namespace

TEST_CASE("difficulty buckets") {
  CHECK(difficulty_bucket(0.2, 0.0, true) == "easy");
  CHECK(difficulty_bucket(0.1, 0.5, true) == "medium");
  CHECK(difficulty_bucket(0.0, 0.25, true) == "medium");
  CHECK(difficulty_bucket(0.0, 0.2, true) == "hard");
  CHECK(difficulty_bucket(0.05, 0.0, true) == "hard");
  CHECK(difficulty_bucket(0.0, 0.0, false) == "extreme");
}

TEST_CASE("a calibrated task records trials, replay and a bucket") {
  const auto g = task("reactor");
  CalibrationConfig cfg;
  cfg.n_trials = 6;
  cfg.sweep_points = 20;
  const auto a = calibrate_task(g.record, g.generating_design, cfg);
  CHECK(a.task_id == g.record.task_id);
  CHECK(a.random_search_rewards.size() == 6);
  CHECK(a.random_search_success.size() == 6);
  REQUIRE(a.replay_success);
  CHECK(*a.replay_success);
  CHECK(a.solvable);
  CHECK(a.warnings.empty());
  CHECK(a.baseline_hit_rate >= 0.0);
  CHECK(a.baseline_hit_rate <= 1.0);
  for (double r : a.random_search_rewards) {
    CHECK(r >= 0.0);
    CHECK(r <= 10.0);
  }
  CHECK(calibration_from_json(to_json(a)).random_search_rewards == a.random_search_rewards);
  CHECK(to_json(calibration_from_json(to_json(a))) == to_json(a));
}

TEST_CASE("without the sidecar a warning is recorded") {
  const auto g = task("alloy");
  const auto a = calibrate_task(g.record, std::nullopt, {20, 2, 8, 0});
  CHECK_FALSE(a.replay_success);
  CHECK(a.warnings.size() == 1);
}

TEST_CASE("calibration is reproducible and independent of worker count") {
  std::vector<TaskRecord> ts;
  std::map<std::string, Design> hidden;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto g = task("pkpd", Level::L2, s);
    ts.push_back(g.record);
    hidden[g.record.task_id] = g.generating_design;
  }
  const CalibrationConfig cfg{10, 4, 16, 3};
  const auto a = calibrate_tasks(ts, hidden, cfg, 1);
  const auto b = calibrate_tasks(ts, hidden, cfg, 3);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(to_json(a[i]).dump() == to_json(b[i]).dump());
  auto other = cfg;
  other.seed = 4;
  CHECK(to_json(calibrate_task(ts[0], hidden[ts[0].task_id], other)).dump() != to_json(a[0]).dump());
}

TEST_CASE("artifacts are written once") {
  const auto dir = fs::temp_directory_path() / ("invdes-cal-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const auto g = task("heatx");
  auto a = calibrate_task(g.record, g.generating_design, {5, 2, 4, 0});
  CHECK(write_calibration(dir, a));
  CHECK_FALSE(write_calibration(dir, a));
  a.baseline_hit_rate += 0.5;
  CHECK_THROWS_AS(write_calibration(dir, a), ImmutableError);
  CHECK(calibration_dir("/x/v1/manifest.json", 7) == fs::path("/x/v1/calibration-seed7"));
  fs::remove_all(dir);
}

TEST_CASE("level profiles average per level") {
  std::vector<TaskRecord> ts;
  std::vector<CalibrationArtifact> as;
  for (int l = 1; l <= 4; ++l) {
    for (int k = 0; k < 2; ++k) {
      TaskRecord t;
      t.goal.domain = "ssa";
      t.goal.difficulty = static_cast<Level>(l);
      ts.push_back(t);
      CalibrationArtifact a;
      a.random_search_rewards = {10.0 - l - k, 10.0 - l + k};
      as.push_back(a);
    }
  }
  const auto p = level_profiles(ts, as);
  REQUIRE(p.size() == 1);
  CHECK(p[0].mean_best_reward[0] == doctest::Approx(9.0));
  CHECK(p[0].mean_best_reward[3] == doctest::Approx(6.0));
  CHECK(p[0].n_tasks[2] == 2);
  CHECK(p[0].non_increasing());
  auto flipped = p[0];
  flipped.mean_best_reward[2] = 9.5;
  CHECK_FALSE(flipped.non_increasing());
}
