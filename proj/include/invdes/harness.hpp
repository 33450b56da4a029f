#pragma once

// Parse -> validate -> execute -> score, single and multi-turn.

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invdes/agent.hpp"
#include "invdes/domain.hpp"
#include "invdes/model.hpp"

namespace invdes {

struct EvalConfig {
  int attempts_K = 3;
  int max_turns = 1;
  double feedback_exact_tol = 0.20;
  double feedback_bound_slack = 0.10;
  double penalty_reward = 0.0;
  bool keep_transcript = false;

  void check() const;  // throws ContractError
};

inline const std::vector<std::string> kEvalModes{"denovo-1", "denovo-5", "denovo-20", "opt-1", "opt-20"};

/// denovo-1 K3x1, denovo-5 K3x5, denovo-20 K1x20, opt-1 K3x1, opt-20 K1x20.
EvalConfig mode_config(const std::string& mode);
/// Task kind a mode evaluates.
TaskKind mode_kind(const std::string& mode);

enum class ParseCode { Ok, NoObject, TypeMismatch };
std::string to_string(ParseCode c);

struct ParseResult {
  ParseCode code = ParseCode::NoObject;
  std::optional<Design> design;
  std::vector<std::string> errors;
  bool ok() const { return code == ParseCode::Ok; }
};

/// Extracts the first JSON object (fenced blocks first) and maps it onto the
/// domain schema. Accepts {"domain", "params"} wrappers or bare params.
ParseResult parse_design(const std::string& raw_text, const std::string& domain);

/// Every violation: unknown keys, constraints and domain invariants.
std::vector<std::string> validate_design(const Design& design, const Goal& goal);

struct FeedbackRow {
  std::string metric;
  TargetKind kind = TargetKind::Exact;
  double target = 0.0;
  double achieved = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

struct FeedbackMessage {
  std::vector<FeedbackRow> rows;
  double reward = 0.0;
  int n_targets_met = 0;
  bool success = false;
  std::string instruction;
};

FeedbackMessage build_feedback(const Goal& goal, const Outcome& outcome, bool success, const EvalConfig& config);
std::string render_feedback(const FeedbackMessage& f, int turn);
/// Inverse of render_feedback; rows that fail to parse are skipped.
std::optional<FeedbackMessage> parse_feedback(const std::string& text);

std::string render_goal(const TaskRecord& task);
std::string render_retry(const ParseResult& parse, const std::vector<std::string>& violations,
                         const std::string& domain, int turn);

struct TranscriptMessage {
  std::string role;  // harness | agent
  std::string text;
  double t_ms = 0.0;  // since attempt start
};

struct TurnRecord {
  int turn = 0;
  std::string raw_response;
  bool parse_ok = false;
  ParseCode parse_code = ParseCode::NoObject;
  bool valid_ok = false;
  std::vector<std::string> violations;
  std::optional<std::string> protocol_error;
  std::optional<Outcome> outcome;
  std::optional<double> reward;
  std::optional<bool> success;
  double generation_ms = 0.0;
  double oracle_ms = 0.0;
};

struct AttemptRecord {
  std::vector<TurnRecord> turns;
  bool success = false;
  bool errored = false;
  std::string error;
  std::vector<TranscriptMessage> transcript;
};

struct EvalResult {
  std::string task_id;
  std::string domain;
  Level level = Level::L1;
  TaskKind kind = TaskKind::DeNovo;
  std::vector<AttemptRecord> attempts;
  double best_reward = 0.0;
  bool task_success = false;
  std::size_t oracle_calls = 0;
  double generation_ms = 0.0;
  double oracle_ms = 0.0;
  double active_ms() const { return generation_ms + oracle_ms; }
};

EvalResult run_task(const TaskRecord& task, const Agent& agent, const EvalConfig& config);

/// Runs tasks on `jobs` workers, preserving input order. Tasks not started
/// when `stop` becomes true are omitted. `on_result` runs under a lock.
std::vector<EvalResult> run_tasks(const std::vector<TaskRecord>& tasks, const Agent& agent,
                                  const EvalConfig& config, int jobs,
                                  const std::atomic<bool>* stop = nullptr,
                                  const std::function<void(const EvalResult&)>& on_result = {});

json to_json(const EvalResult& r, bool with_transcript = false);
EvalResult eval_result_from_json(const json& j);

struct DomainStats {
  std::size_t n_tasks = 0;
  double parse_rate = 0.0;  // percent
  double validity_rate = 0.0;
  double success_rate = 0.0;
  double mean_best_reward = 0.0;
  std::map<Level, double> success_by_level;
};

struct AggregateReport {
  std::map<std::string, DomainStats> domains;
  double overall_score = 0.0;  // unweighted mean of per-domain success rates
  std::vector<std::string> domain_set;
  std::vector<std::string> warnings;
};

AggregateReport aggregate(const std::vector<EvalResult>& results, const std::vector<std::string>& domain_set);
json to_json(const AggregateReport& r);
std::string render_table(const AggregateReport& r);

/// Domains present in every result set, in canonical order.
std::vector<std::string> shared_domains(const std::vector<std::vector<EvalResult>>& runs);

/// Side-by-side success table; the shared-core row averages the domains
/// every run covers.
std::string render_comparison(const std::vector<std::string>& names, const std::vector<std::vector<EvalResult>>& runs);

}  // namespace invdes
