#include "invdes/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "invdes/agents.hpp"
#include "invdes/domain.hpp"
#include "invdes/taskgen.hpp"

namespace invdes {

namespace {

constexpr double kEasyHitRate = 0.1;
constexpr double kMediumSuccessRate = 0.25;

std::vector<int> first_primes(std::size_t n) {
  std::vector<int> primes;
  for (int k = 2; primes.size() < n; ++k) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > k) break;
      if (k % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(k);
  }
  return primes;
}

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

struct Probe {
  bool success = false;
  double reward = 0.0;
};

Probe probe(const Domain& dom, const TaskRecord& task, const Design& d) {
  if (!design_errors(dom, task.goal, d.params).empty()) return {};
  try {
    const auto out = run_oracle(dom, task.goal, d);
    return {success_predicate(task.goal, out, task.starting_design, d), base_reward(task.goal, out)};
  } catch (const ValidationError&) {
    return {};
  }
}

}  // namespace

void CalibrationConfig::check() const {
  if (budget < 1 || n_trials < 1 || sweep_points < 1) throw ContractError("calibration counts must be >= 1");
}

double CalibrationArtifact::random_search_success_rate() const {
  if (random_search_success.empty()) return 0.0;
  const auto hits = std::count(random_search_success.begin(), random_search_success.end(), true);
  return static_cast<double>(hits) / static_cast<double>(random_search_success.size());
}

double CalibrationArtifact::mean_random_search_reward() const {
  if (random_search_rewards.empty()) return 0.0;
  return std::accumulate(random_search_rewards.begin(), random_search_rewards.end(), 0.0) /
         static_cast<double>(random_search_rewards.size());
}

std::string difficulty_bucket(double sweep_hit_rate, double random_success_rate, bool any_probe_success) {
  if (sweep_hit_rate > kEasyHitRate) return "easy";
  if (!any_probe_success) return "extreme";
  // Hard also covers tasks only the sweep solved.
  return random_success_rate >= kMediumSuccessRate ? "medium" : "hard";
}

CalibrationArtifact calibrate_task(const TaskRecord& task, const std::optional<Design>& hidden,
                                   const CalibrationConfig& config) {
  config.check();
  const Domain& dom = get_domain(task.goal.domain);
  CalibrationArtifact a;
  a.task_id = task.task_id;
  a.seed = config.seed;
  a.budget = config.budget;
  a.sweep_points = config.sweep_points;

  // Halton sweep over the unit cube of the parameterization.
  const auto coords = dom.coordinates(task.goal);
  const auto primes = first_primes(coords.size());
  int hits = 0;
  for (int j = 1; j <= config.sweep_points; ++j) {
    std::vector<double> u(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) u[i] = radical_inverse(static_cast<std::uint64_t>(j), primes[i]);
    if (probe(dom, task, dom.decode(task.goal, point_from_unit(coords, u))).success) ++hits;
  }
  a.baseline_hit_rate = static_cast<double>(hits) / config.sweep_points;

  for (int t = 0; t < config.n_trials; ++t) {
    double best = 0.0;
    bool ok = false;
    for (int s = 0; s < config.budget; ++s) {
      CounterRng rng{config.seed, hash_string(task.task_id), static_cast<std::uint64_t>(t),
                     static_cast<std::uint64_t>(s)};
      const auto p = probe(dom, task, random_design(task.goal, rng));
      best = std::max(best, p.reward);
      ok = ok || p.success;
    }
    a.random_search_rewards.push_back(best);
    a.random_search_success.push_back(ok);
  }

  if (hidden) {
    a.replay_success = probe(dom, task, *hidden).success;
  } else {
    a.warnings.push_back("hidden generating design unavailable; solvability from probes only");
  }
  const bool any_probe = hits > 0 || a.random_search_success_rate() > 0.0;
  a.solvable = a.replay_success.value_or(false) || any_probe;
  a.difficulty_bucket = difficulty_bucket(a.baseline_hit_rate, a.random_search_success_rate(), any_probe);
  return a;
}

std::vector<CalibrationArtifact> calibrate_tasks(const std::vector<TaskRecord>& tasks,
                                                 const std::map<std::string, Design>& hidden,
                                                 const CalibrationConfig& config, int jobs) {
  if (jobs < 1) throw ContractError("jobs must be >= 1");
  config.check();
  std::vector<CalibrationArtifact> out(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      try {
        const auto it = hidden.find(tasks[i].task_id);
        out[i] = calibrate_task(tasks[i], it == hidden.end() ? std::nullopt : std::optional<Design>(it->second),
                                config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool LevelProfile::non_increasing() const {
  double prev = 0.0;
  bool first = true;
  for (std::size_t l = 0; l < 4; ++l) {
    if (n_tasks[l] == 0) continue;
    if (!first && mean_best_reward[l] > prev) return false;
    prev = mean_best_reward[l];
    first = false;
  }
  return true;
}

std::vector<LevelProfile> level_profiles(const std::vector<TaskRecord>& tasks,
                                         const std::vector<CalibrationArtifact>& artifacts) {
  if (tasks.size() != artifacts.size()) throw ContractError("one artifact per task");
  std::map<std::string, LevelProfile> by_domain;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& p = by_domain[tasks[i].goal.domain];
    p.domain = tasks[i].goal.domain;
    const auto l = static_cast<std::size_t>(tasks[i].goal.difficulty) - 1;
    p.mean_best_reward[l] += artifacts[i].mean_random_search_reward();
    ++p.n_tasks[l];
  }
  std::vector<LevelProfile> out;
  for (const auto& id : domain_ids()) {
    auto it = by_domain.find(id);
    if (it == by_domain.end()) continue;
    for (std::size_t l = 0; l < 4; ++l) {
      if (it->second.n_tasks[l] > 0) it->second.mean_best_reward[l] /= it->second.n_tasks[l];
    }
    out.push_back(it->second);
  }
  return out;
}

json to_json(const CalibrationArtifact& a) {
  json j = {{"schema_version", kCalibrationSchemaVersion},
            {"task_id", a.task_id},
            {"seed", a.seed},
            {"budget", a.budget},
            {"sweep_points", a.sweep_points},
            {"baseline_hit_rate", a.baseline_hit_rate},
            {"random_search_rewards", a.random_search_rewards},
            {"random_search_success", a.random_search_success},
            {"replay_success", a.replay_success ? json(*a.replay_success) : json(nullptr)},
            {"solvable", a.solvable},
            {"difficulty_bucket", a.difficulty_bucket},
            {"warnings", a.warnings}};
  return j;
}

CalibrationArtifact calibration_from_json(const json& j) {
  if (j.value("schema_version", 0) != kCalibrationSchemaVersion) {
    throw ContractError("unsupported calibration schema version");
  }
  CalibrationArtifact a;
  a.task_id = j.at("task_id").get<std::string>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.budget = j.at("budget").get<int>();
  a.sweep_points = j.at("sweep_points").get<int>();
  a.baseline_hit_rate = j.at("baseline_hit_rate").get<double>();
  a.random_search_rewards = j.at("random_search_rewards").get<std::vector<double>>();
  a.random_search_success = j.at("random_search_success").get<std::vector<bool>>();
  if (!j.at("replay_success").is_null()) a.replay_success = j.at("replay_success").get<bool>();
  a.solvable = j.at("solvable").get<bool>();
  a.difficulty_bucket = j.at("difficulty_bucket").get<std::string>();
  a.warnings = j.at("warnings").get<std::vector<std::string>>();
  return a;
}

std::filesystem::path calibration_dir(const std::filesystem::path& manifest_file, std::uint64_t seed) {
  return manifest_file.parent_path() / ("calibration-seed" + std::to_string(seed));
}

bool write_calibration(const std::filesystem::path& dir, const CalibrationArtifact& a) {
  namespace fs = std::filesystem;
  const auto path = dir / (a.task_id + ".json");
  const std::string text = to_json(a).dump(2) + "\n";
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str() == text) return false;
    throw ImmutableError("calibration artifact differs from existing " + path.string());
  }
  fs::create_directories(dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << text;
  }
  fs::rename(tmp, path);
  return true;
}

}  // namespace invdes
