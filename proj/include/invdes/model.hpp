#pragma once

// Goal / design / outcome data model, difficulty tolerances, the success
// predicate and the bounded base reward shared by every domain.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace invdes {

using json = nlohmann::json;

/// Thrown when an operation is called with arguments that break its contract
/// (domain mismatch, empty target list, out-of-range tolerance).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown by a typed oracle when its design input is malformed.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TargetKind { Exact, MinBound, MaxBound };
enum class Level { L1 = 1, L2 = 2, L3 = 3, L4 = 4 };
enum class TaskKind { DeNovo, Optimization };
enum class BoundKind { Range, EnumMember, SumToOne, MaxCount };

inline constexpr double kRelErrDenominatorGuard = 1e-9;
inline constexpr double kDefaultBoundSlack = 0.10;
inline constexpr double kRewardToleranceCap = 1.0;
inline constexpr double kMaxBaseReward = 10.0;

/// Relative tolerance for exact targets at a difficulty level.
double level_tolerance(Level level);

/// Number of targets a goal at `level` carries for a domain with
/// `n_metrics` declared metrics.
std::size_t level_target_count(Level level, std::size_t n_metrics);

std::string to_string(TargetKind kind);
std::string to_string(Level level);
std::string to_string(TaskKind kind);
std::string to_string(BoundKind kind);
TargetKind target_kind_from_string(std::string_view s);
Level level_from_string(std::string_view s);
TaskKind task_kind_from_string(std::string_view s);
BoundKind bound_kind_from_string(std::string_view s);

struct TargetSpec {
  std::string metric_name;
  TargetKind kind = TargetKind::Exact;
  double value = 0.0;
};

/// Mechanical bound on a design parameter. `parameter_path` addresses JSON
/// values inside Design::params: `a.b`, `list[].field`, `map.*` (values) and
/// `map.@keys` (keys).
struct Constraint {
  std::string parameter_path;
  BoundKind bound_kind = BoundKind::Range;
  json bound_value;  // [lo, hi] | [choices...] | tolerance | count
};

struct Goal {
  std::string domain;
  std::vector<TargetSpec> targets;
  std::vector<Constraint> constraints;
  Level difficulty = Level::L1;
  std::uint64_t seed = 0;
  TaskKind task_kind = TaskKind::DeNovo;
  double bound_slack = kDefaultBoundSlack;
  // Fixed per-task system configuration (plant, kinetics, PK parameters...).
  json context = json::object();

  double tolerance() const { return level_tolerance(difficulty); }
};

struct Design {
  std::string domain;
  json params = json::object();
};

struct Outcome {
  std::string domain;
  std::map<std::string, double> metrics;
};

struct TaskRecord {
  std::string task_id;
  Goal goal;
  std::optional<Design> starting_design;
  std::optional<Outcome> starting_outcome;
};

struct TargetCheck {
  bool pass = false;
  double rel_error = 0.0;         // signed (achieved - value) / max(|value|, guard)
  double distance = 0.0;          // one-sided for bounds, |rel_error| for exact
  bool evaluation_error = false;  // achieved was not finite
};

double relative_error(double target, double achieved);

/// Checks one target. `tolerance` applies to exact targets, `bound_slack` to
/// min/max bounds.
TargetCheck check_target(const TargetSpec& target, double achieved, double tolerance,
                         double bound_slack = kDefaultBoundSlack);

/// Canonical form used by the design-equality relation: lexicographic keys,
/// numbers rounded to 9 significant digits, array order preserved.
json canonicalize(const json& value);
bool designs_equal(const Design& a, const Design& b);

/// All targets pass at the goal tolerance and, for optimization tasks, the
/// proposal differs from the starting design.
bool success_predicate(const Goal& goal, const Outcome& outcome,
                       const std::optional<Design>& starting_design, const Design& proposed);

/// Targets-only part of the success predicate.
bool targets_met(const Goal& goal, const Outcome& outcome, double tolerance);

double base_reward(const Goal& goal, const Outcome& outcome);

// Canonical JSON serialization (wire format for the harness and agents).
json to_json(const TargetSpec& t);
json to_json(const Constraint& c);
json to_json(const Goal& g);
json to_json(const Design& d);
json to_json(const Outcome& o);
json to_json(const TaskRecord& r);
TargetSpec target_from_json(const json& j);
Constraint constraint_from_json(const json& j);
Goal goal_from_json(const json& j);
Design design_from_json(const json& j);
Outcome outcome_from_json(const json& j);
TaskRecord task_from_json(const json& j);

/// Compact canonical string (sorted keys, round-trip exact numbers).
std::string dump_canonical(const json& j);

}  // namespace invdes
