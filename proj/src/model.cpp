#include "invdes/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace invdes {

double level_tolerance(Level level) {
  switch (level) {
    case Level::L1: return 0.30;
    case Level::L2: return 0.25;
    case Level::L3: return 0.20;
    case Level::L4: return 0.15;
  }
  throw ContractError("unknown difficulty level");
}

std::size_t level_target_count(Level level, std::size_t n_metrics) {
  switch (level) {
    case Level::L1: return std::min<std::size_t>(1, n_metrics);
    case Level::L2: return std::min<std::size_t>(2, n_metrics);
    case Level::L3: return std::min<std::size_t>(3, n_metrics);
    case Level::L4: return n_metrics;
  }
  throw ContractError("unknown difficulty level");
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Exact: return "exact";
    case TargetKind::MinBound: return "min_bound";
    case TargetKind::MaxBound: return "max_bound";
  }
  return "?";
}

std::string to_string(Level level) { return "L" + std::to_string(static_cast<int>(level)); }

std::string to_string(TaskKind kind) {
  return kind == TaskKind::DeNovo ? "de_novo" : "optimization";
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Range: return "range";
    case BoundKind::EnumMember: return "enum_member";
    case BoundKind::SumToOne: return "sum_to_one";
    case BoundKind::MaxCount: return "max_count";
  }
  return "?";
}

TargetKind target_kind_from_string(std::string_view s) {
  if (s == "exact") return TargetKind::Exact;
  if (s == "min_bound") return TargetKind::MinBound;
  if (s == "max_bound") return TargetKind::MaxBound;
  throw ContractError("unknown target kind: " + std::string(s));
}

Level level_from_string(std::string_view s) {
  if (s == "L1") return Level::L1;
  if (s == "L2") return Level::L2;
  if (s == "L3") return Level::L3;
  if (s == "L4") return Level::L4;
  throw ContractError("unknown difficulty level: " + std::string(s));
}

TaskKind task_kind_from_string(std::string_view s) {
  if (s == "de_novo") return TaskKind::DeNovo;
  if (s == "optimization") return TaskKind::Optimization;
  throw ContractError("unknown task kind: " + std::string(s));
}

BoundKind bound_kind_from_string(std::string_view s) {
  if (s == "range") return BoundKind::Range;
  if (s == "enum_member") return BoundKind::EnumMember;
  if (s == "sum_to_one") return BoundKind::SumToOne;
  if (s == "max_count") return BoundKind::MaxCount;
  throw ContractError("unknown bound kind: " + std::string(s));
}

double relative_error(double target, double achieved) {
  return (achieved - target) / std::max(std::abs(target), kRelErrDenominatorGuard);
}

TargetCheck check_target(const TargetSpec& target, double achieved, double tolerance,
                         double bound_slack) {
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw ContractError("tolerance must lie in (0, 1)");
  }
  TargetCheck out;
  if (!std::isfinite(achieved)) {
    out.evaluation_error = true;
    out.rel_error = std::numeric_limits<double>::infinity();
    out.distance = std::numeric_limits<double>::infinity();
    return out;
  }
  const double denom = std::max(std::abs(target.value), kRelErrDenominatorGuard);
  out.rel_error = (achieved - target.value) / denom;
  switch (target.kind) {
    case TargetKind::Exact:
      out.distance = std::abs(out.rel_error);
      out.pass = out.distance <= tolerance;
      break;
    case TargetKind::MinBound: {
      const double bound = target.value * (1.0 - bound_slack);
      out.pass = achieved >= bound;
      out.distance = std::max(0.0, (bound - achieved) / denom);
      break;
    }
    case TargetKind::MaxBound: {
      const double bound = target.value * (1.0 + bound_slack);
      out.pass = achieved <= bound;
      out.distance = std::max(0.0, (achieved - bound) / denom);
      break;
    }
  }
  return out;
}

namespace {

double round_significant(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  return std::strtod(buf, nullptr);
}

void require_domain(const std::string& expected, const std::string& got, const char* what) {
  if (expected != got) {
    throw ContractError(std::string(what) + " domain '" + got + "' does not match goal domain '" +
                        expected + "'");
  }
}

}  // namespace

json canonicalize(const json& value) {
  if (value.is_number()) return round_significant(value.get<double>(), 9);
  if (value.is_array()) {
    json out = json::array();
    for (const auto& v : value) out.push_back(canonicalize(v));
    return out;
  }
  if (value.is_object()) {
    json out = json::object();
    for (auto it = value.begin(); it != value.end(); ++it) out[it.key()] = canonicalize(it.value());
    return out;
  }
  return value;
}

bool designs_equal(const Design& a, const Design& b) {
  return a.domain == b.domain && canonicalize(a.params) == canonicalize(b.params);
}

bool targets_met(const Goal& goal, const Outcome& outcome, double tolerance) {
  require_domain(goal.domain, outcome.domain, "outcome");
  for (const auto& t : goal.targets) {
    auto it = outcome.metrics.find(t.metric_name);
    if (it == outcome.metrics.end()) {
      throw ContractError("outcome lacks metric '" + t.metric_name + "'");
    }
    if (!check_target(t, it->second, tolerance, goal.bound_slack).pass) return false;
  }
  return true;
}

bool success_predicate(const Goal& goal, const Outcome& outcome,
                       const std::optional<Design>& starting_design, const Design& proposed) {
  require_domain(goal.domain, proposed.domain, "design");
  if (!targets_met(goal, outcome, goal.tolerance())) return false;
  if (goal.task_kind == TaskKind::Optimization && starting_design &&
      designs_equal(*starting_design, proposed)) {
    return false;
  }
  return true;
}

double base_reward(const Goal& goal, const Outcome& outcome) {
  require_domain(goal.domain, outcome.domain, "outcome");
  if (goal.targets.empty()) throw ContractError("base_reward needs at least one target");
  double sum = 0.0;
  for (const auto& t : goal.targets) {
    auto it = outcome.metrics.find(t.metric_name);
    if (it == outcome.metrics.end()) {
      throw ContractError("outcome lacks metric '" + t.metric_name + "'");
    }
    const auto check = check_target(t, it->second, goal.tolerance(), goal.bound_slack);
    sum += std::min(1.0, check.distance / kRewardToleranceCap);
  }
  return kMaxBaseReward * (1.0 - sum / static_cast<double>(goal.targets.size()));
}

json to_json(const TargetSpec& t) {
  return {{"metric", t.metric_name}, {"kind", to_string(t.kind)}, {"value", t.value}};
}

json to_json(const Constraint& c) {
  return {{"path", c.parameter_path}, {"bound", to_string(c.bound_kind)}, {"value", c.bound_value}};
}

json to_json(const Goal& g) {
  json targets = json::array();
  for (const auto& t : g.targets) targets.push_back(to_json(t));
  json constraints = json::array();
  for (const auto& c : g.constraints) constraints.push_back(to_json(c));
  return {{"domain", g.domain},         {"targets", targets},
          {"constraints", constraints}, {"difficulty", to_string(g.difficulty)},
          {"seed", g.seed},             {"task_kind", to_string(g.task_kind)},
          {"bound_slack", g.bound_slack}, {"context", g.context}};
}

json to_json(const Design& d) { return {{"domain", d.domain}, {"params", d.params}}; }

json to_json(const Outcome& o) {
  json metrics = json::object();
  for (const auto& [k, v] : o.metrics) metrics[k] = v;
  return {{"domain", o.domain}, {"metrics", metrics}};
}

json to_json(const TaskRecord& r) {
  json j = {{"task_id", r.task_id}, {"goal", to_json(r.goal)}};
  if (r.starting_design) j["starting_design"] = to_json(*r.starting_design);
  if (r.starting_outcome) j["starting_outcome"] = to_json(*r.starting_outcome);
  return j;
}

TargetSpec target_from_json(const json& j) {
  TargetSpec t;
  t.metric_name = j.at("metric").get<std::string>();
  t.kind = target_kind_from_string(j.at("kind").get<std::string>());
  t.value = j.at("value").get<double>();
  if (t.metric_name.empty()) throw ContractError("target metric name is empty");
  if (!std::isfinite(t.value)) throw ContractError("target value is not finite");
  return t;
}

Constraint constraint_from_json(const json& j) {
  return {j.at("path").get<std::string>(), bound_kind_from_string(j.at("bound").get<std::string>()),
          j.at("value")};
}

Goal goal_from_json(const json& j) {
  Goal g;
  g.domain = j.at("domain").get<std::string>();
  for (const auto& t : j.at("targets")) g.targets.push_back(target_from_json(t));
  for (const auto& c : j.at("constraints")) g.constraints.push_back(constraint_from_json(c));
  g.difficulty = level_from_string(j.at("difficulty").get<std::string>());
  g.seed = j.at("seed").get<std::uint64_t>();
  g.task_kind = task_kind_from_string(j.at("task_kind").get<std::string>());
  g.bound_slack = j.value("bound_slack", kDefaultBoundSlack);
  g.context = j.value("context", json::object());
  return g;
}

Design design_from_json(const json& j) {
  return {j.at("domain").get<std::string>(), j.at("params")};
}

Outcome outcome_from_json(const json& j) {
  Outcome o;
  o.domain = j.at("domain").get<std::string>();
  for (auto it = j.at("metrics").begin(); it != j.at("metrics").end(); ++it) {
    o.metrics[it.key()] = it.value().get<double>();
  }
  return o;
}

TaskRecord task_from_json(const json& j) {
  TaskRecord r;
  r.task_id = j.at("task_id").get<std::string>();
  r.goal = goal_from_json(j.at("goal"));
  if (j.contains("starting_design")) r.starting_design = design_from_json(j["starting_design"]);
  if (j.contains("starting_outcome")) r.starting_outcome = outcome_from_json(j["starting_outcome"]);
  return r;
}

std::string dump_canonical(const json& j) { return j.dump(); }

}  // namespace invdes
