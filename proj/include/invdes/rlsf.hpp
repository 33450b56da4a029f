#pragma once

// Environment side of reinforcement learning from simulator feedback:
// shaped reward, group-relative advantages, the clipped surrogate term,
// batched rollouts and a cross-entropy reference optimizer.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "invdes/model.hpp"

namespace invdes {

struct RewardConfig {
  double lambda_feas = 0.0;
  double lambda_pars = 0.0;
  double success_bonus = 5.0;
  double per_target_credit = 1.0;
  double diversity_bonus = 0.5;
  double penalty_reward = 0.0;  // parse or validation failure
  // Tolerances at which a target counts as met for partial credit.
  double feedback_exact_tol = 0.20;
  double feedback_bound_slack = 0.10;

  void check() const;  // throws ContractError
};

/// base + credit * targets met + bonus * success + lambda_feas + lambda_pars * parsimony.
/// The design must already have passed validation.
double shaped_reward(const Goal& goal, const Design& design, const Outcome& outcome, const RewardConfig& config,
                     const std::optional<Design>& starting_design = std::nullopt);

/// (r - mean) / (population std + epsilon). Needs at least two rewards.
std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon = 1e-8);

/// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double clipped_objective_term(double rho, double advantage, double clip_eps);

/// Non-negative k3 estimator of KL(policy || reference) from two log-probabilities.
double kl_k3(double logp_policy, double logp_reference);

struct GroupSample {
  std::string task_id;
  Goal goal;
  std::vector<Design> designs;  // empty params when the sample failed to parse
  std::vector<std::string> raw_texts;
  std::vector<double> rewards;
  std::vector<bool> unique_flags;
  std::vector<bool> valid_flags;
  std::vector<bool> success_flags;
};

/// Returns raw agent text for sample k of goal i.
using Sampler = std::function<std::string(const TaskRecord& task, std::uint64_t seed, int i, int k)>;

/// Samples K completions per task, executes valid ones and scores them. The
/// first occurrence of each distinct design earns the diversity bonus.
std::vector<GroupSample> rollout_batch(const std::vector<TaskRecord>& tasks, const Sampler& sampler, int K,
                                       std::uint64_t seed, const RewardConfig& config = {}, int jobs = 1);

json to_json(const GroupSample& g);

/// Writes one {task_id, goal, design, reward} line per valid sample with
/// reward > tau. Returns the number of lines.
std::size_t export_sft(const std::vector<GroupSample>& groups, double tau, std::ostream& out);

struct CemConfig {
  int iterations = 10;
  int population = 50;
  double elite_frac = 0.2;
  std::uint64_t seed = 0;
  double init_sigma = 0.3;   // unit-space standard deviation
  double smoothing = 0.7;    // weight of the refit vs. the previous distribution
  double min_sigma = 1e-3;   // below this the variance is re-inflated
  double reinflate_sigma = 0.1;
  bool stop_on_success = true;
  RewardConfig reward;

  void check() const;
};

struct CemResult {
  Design best_design;
  double best_reward = 0.0;
  bool success = false;
  std::vector<double> trace;  // running-best shaped reward after each iteration
  std::size_t oracle_calls = 0;
  int iterations_run = 0;
};

CemResult cem_optimize(const TaskRecord& task, const CemConfig& config = {});

}  // namespace invdes
