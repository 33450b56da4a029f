#include "invdes/rlsf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "invdes/domain.hpp"
#include "invdes/harness.hpp"
#include "invdes/rng.hpp"

namespace invdes {

void RewardConfig::check() const {
  for (double v : {lambda_feas, lambda_pars, success_bonus, per_target_credit, diversity_bonus, penalty_reward}) {
    if (!(v >= 0.0)) throw ContractError("reward weights must be non-negative");
  }
  if (!(feedback_exact_tol > 0.0) || !(feedback_bound_slack >= 0.0)) {
    throw ContractError("feedback tolerances must be positive");
  }
}

double shaped_reward(const Goal& goal, const Design& design, const Outcome& outcome, const RewardConfig& config,
                     const std::optional<Design>& starting_design) {
  int met = 0;
  for (const auto& t : goal.targets) {
    const auto it = outcome.metrics.find(t.metric_name);
    if (it == outcome.metrics.end()) throw ContractError("outcome lacks metric '" + t.metric_name + "'");
    met += check_target(t, it->second, config.feedback_exact_tol, config.feedback_bound_slack).pass ? 1 : 0;
  }
  const bool success = success_predicate(goal, outcome, starting_design, design);
  double r = base_reward(goal, outcome) + config.per_target_credit * met + (success ? config.success_bonus : 0.0) +
             config.lambda_feas;
  if (config.lambda_pars != 0.0) r += config.lambda_pars * get_domain(goal.domain).parsimony(goal, design);
  return r;
}

std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon) {
  if (rewards.size() < 2) throw ContractError("group_advantages needs at least two rewards");
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / (sd + epsilon));
  return out;
}

double clipped_objective_term(double rho, double advantage, double clip_eps) {
  if (!(rho > 0.0)) throw ContractError("rho must be positive");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw ContractError("clip_eps must lie in (0, 1)");
  return std::min(rho * advantage, std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps) * advantage);
}

double kl_k3(double logp_policy, double logp_reference) {
  const double d = logp_reference - logp_policy;
  return std::exp(d) - d - 1.0;
}

namespace {

struct SampleResult {
  Design design;
  std::string raw;
  bool valid = false;
  bool success = false;
  double reward = 0.0;
};

SampleResult score_sample(const TaskRecord& task, std::string raw, const RewardConfig& config) {
  SampleResult s;
  s.raw = std::move(raw);
  s.reward = config.penalty_reward;
  s.design.domain = task.goal.domain;
  auto parsed = parse_design(s.raw, task.goal.domain);
  if (!parsed.ok()) return s;
  s.design = *parsed.design;
  if (!validate_design(s.design, task.goal).empty()) return s;
  try {
    const auto out = run_oracle(get_domain(task.goal.domain), task.goal, s.design);
    s.reward = shaped_reward(task.goal, s.design, out, config, task.starting_design);
    s.success = success_predicate(task.goal, out, task.starting_design, s.design);
    s.valid = true;
  } catch (const std::exception&) {
    s.reward = config.penalty_reward;
  }
  return s;
}

}  // namespace

std::vector<GroupSample> rollout_batch(const std::vector<TaskRecord>& tasks, const Sampler& sampler, int K,
                                       std::uint64_t seed, const RewardConfig& config, int jobs) {
  if (K < 2) throw ContractError("group size K must be >= 2");
  if (jobs < 1) throw ContractError("jobs must be >= 1");
  config.check();
  const std::size_t M = tasks.size();
  std::vector<SampleResult> flat(M * static_cast<std::size_t>(K));

  // Sampling is sequential so stateful samplers stay deterministic; oracle
  // calls fan out.
  for (std::size_t i = 0; i < M; ++i) {
    for (int k = 0; k < K; ++k) flat[i * K + k].raw = sampler(tasks[i], seed, static_cast<int>(i), k);
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t n; (n = next.fetch_add(1)) < flat.size();) {
      flat[n] = score_sample(tasks[n / K], std::move(flat[n].raw), config);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<GroupSample> groups;
  for (std::size_t i = 0; i < M; ++i) {
    GroupSample g;
    g.task_id = tasks[i].task_id;
    g.goal = tasks[i].goal;
    std::set<std::string> seen;
    for (int k = 0; k < K; ++k) {
      auto& s = flat[i * K + k];
      const bool unique = s.valid && seen.insert(canonicalize(s.design.params).dump()).second;
      g.designs.push_back(s.design);
      g.raw_texts.push_back(s.raw);
      g.rewards.push_back(s.reward + (unique ? config.diversity_bonus : 0.0));
      g.unique_flags.push_back(unique);
      g.valid_flags.push_back(s.valid);
      g.success_flags.push_back(s.success);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

json to_json(const GroupSample& g) {
  json designs = json::array();
  for (const auto& d : g.designs) designs.push_back(d.params);
  return {{"task_id", g.task_id},     {"goal", to_json(g.goal)},          {"designs", designs},
          {"rewards", g.rewards},     {"unique", g.unique_flags},         {"valid", g.valid_flags},
          {"success", g.success_flags}, {"advantages", group_advantages(g.rewards)}};
}

std::size_t export_sft(const std::vector<GroupSample>& groups, double tau, std::ostream& out) {
  if (!std::isfinite(tau)) throw ContractError("tau must be finite");
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < g.designs.size(); ++k) {
      if (!g.valid_flags[k] || !(g.rewards[k] > tau)) continue;
      out << json{{"task_id", g.task_id}, {"goal", to_json(g.goal)}, {"design", to_json(g.designs[k])},
                  {"reward", g.rewards[k]}}
                 .dump()
          << "\n";
      ++n;
    }
  }
  return n;
}

void CemConfig::check() const {
  if (iterations < 1 || population < 1) throw ContractError("cem iterations and population must be >= 1");
  if (!(elite_frac > 0.0 && elite_frac <= 1.0)) throw ContractError("elite_frac must lie in (0, 1]");
  if (!(init_sigma > 0.0) || !(reinflate_sigma > 0.0) || !(min_sigma >= 0.0)) {
    throw ContractError("cem sigmas must be positive");
  }
  if (!(smoothing > 0.0 && smoothing <= 1.0)) throw ContractError("smoothing must lie in (0, 1]");
  reward.check();
}

namespace {

// Wide integer ranges are searched like reals and rounded on decode.
bool is_continuous(const Coordinate& c) {
  return c.type == CoordType::Real || (c.type == CoordType::Integer && c.span() > 12.0);
}

std::size_t n_values(const Coordinate& c) {
  return static_cast<std::size_t>(std::llround(c.hi) - std::llround(c.lo) + 1);
}

}  // namespace

CemResult cem_optimize(const TaskRecord& task, const CemConfig& config) {
  config.check();
  const Domain& dom = get_domain(task.goal.domain);
  const auto coords = dom.coordinates(task.goal);
  const std::size_t D = coords.size();

  // Continuous coordinates: Gaussian in unit space. Discrete ones (integers
  // and categories alike): a probability per admissible value.
  std::vector<double> mu(D, 0.5), sigma(D, config.init_sigma);
  std::vector<std::vector<double>> probs(D);
  Point start;
  if (task.starting_design) start = dom.encode(task.goal, *task.starting_design);
  for (std::size_t i = 0; i < D; ++i) {
    if (is_continuous(coords[i])) {
      if (!start.empty()) mu[i] = std::clamp(to_unit(coords[i], start[i]), 0.0, 1.0);
    } else {
      probs[i].assign(n_values(coords[i]), 1.0 / static_cast<double>(n_values(coords[i])));
    }
  }

  const auto n_elite = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.elite_frac * config.population)));
  CemResult res;
  bool have_best = false;
  for (int it = 0; it < config.iterations; ++it) {
    struct Member {
      std::vector<double> u;
      double reward;
    };
    std::vector<Member> pop;
    for (int p = 0; p < config.population; ++p) {
      CounterRng rng{config.seed, hash_string(task.task_id), static_cast<std::uint64_t>(it),
                     static_cast<std::uint64_t>(p)};
      Member m{std::vector<double>(D), config.reward.penalty_reward};
      Point x(D);
      for (std::size_t i = 0; i < D; ++i) {
        const auto& c = coords[i];
        if (is_continuous(c)) {
          m.u[i] = std::clamp(mu[i] + sigma[i] * rng.normal(), 0.0, 1.0);
          x[i] = from_unit(c, m.u[i]);
        } else {
          double r = rng.uniform();
          std::size_t k = 0;
          while (k + 1 < probs[i].size() && r >= probs[i][k]) r -= probs[i][k++];
          m.u[i] = static_cast<double>(k);
          x[i] = std::round(c.lo) + static_cast<double>(k);
        }
      }
      const Design d = dom.decode(task.goal, clamp_point(coords, x));
      bool success = false;
      if (design_errors(dom, task.goal, d.params).empty()) {
        try {
          ++res.oracle_calls;
          const auto out = run_oracle(dom, task.goal, d);
          m.reward = shaped_reward(task.goal, d, out, config.reward, task.starting_design);
          success = success_predicate(task.goal, out, task.starting_design, d);
        } catch (const ValidationError&) {
        }
      }
      if (!have_best || m.reward > res.best_reward) {
        have_best = true;
        res.best_reward = m.reward;
        res.best_design = d;
        res.success = success;
      }
      pop.push_back(std::move(m));
    }
    res.trace.push_back(res.best_reward);
    res.iterations_run = it + 1;
    if (config.stop_on_success && res.success) break;

    std::stable_sort(pop.begin(), pop.end(), [](const Member& a, const Member& b) { return a.reward > b.reward; });
    const std::size_t E = std::min(n_elite, pop.size());
    const double a = config.smoothing;
    for (std::size_t i = 0; i < D; ++i) {
      if (is_continuous(coords[i])) {
        double m = 0.0, v = 0.0;
        for (std::size_t e = 0; e < E; ++e) m += pop[e].u[i];
        m /= static_cast<double>(E);
        for (std::size_t e = 0; e < E; ++e) v += (pop[e].u[i] - m) * (pop[e].u[i] - m);
        double s = std::sqrt(v / static_cast<double>(E));
        if (s < config.min_sigma) s = config.reinflate_sigma;
        mu[i] = a * m + (1.0 - a) * mu[i];
        sigma[i] = a * s + (1.0 - a) * sigma[i];
      } else {
        std::vector<double> freq(probs[i].size(), 0.0);
        for (std::size_t e = 0; e < E; ++e) freq[static_cast<std::size_t>(pop[e].u[i])] += 1.0 / static_cast<double>(E);
        for (std::size_t k = 0; k < freq.size(); ++k) probs[i][k] = a * freq[k] + (1.0 - a) * probs[i][k];
      }
    }
  }
  return res;
}

}  // namespace invdes
