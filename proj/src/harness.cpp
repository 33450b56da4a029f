#include "invdes/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "invdes/constraints.hpp"

namespace invdes {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string signed_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.4f", v);
  return buf;
}

std::string kind_word(TargetKind k) {
  switch (k) {
    case TargetKind::Exact: return "exact";
    case TargetKind::MinBound: return "min";
    case TargetKind::MaxBound: return "max";
  }
  return "exact";
}

/// End of the JSON object starting at `open`, honouring strings; npos if
/// the braces never balance.
std::size_t match_brace(const std::string& s, std::size_t open) {
  int depth = 0;
  bool in_str = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::string::npos;
}

std::optional<json> first_object(const std::string& s) {
  for (std::size_t i = s.find('{'); i != std::string::npos; i = s.find('{', i + 1)) {
    const auto end = match_brace(s, i);
    if (end == std::string::npos) continue;
    auto j = json::parse(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(end) + 1, nullptr, false);
    if (!j.is_discarded() && j.is_object()) return j;
  }
  return std::nullopt;
}

std::vector<std::string> fenced_blocks(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = s.find("```", pos);
    if (open == std::string::npos) break;
    const auto body = s.find('\n', open);
    if (body == std::string::npos) break;
    const auto close = s.find("```", body);
    if (close == std::string::npos) {
      out.push_back(s.substr(body + 1));
      break;
    }
    out.push_back(s.substr(body + 1, close - body - 1));
    pos = close + 3;
  }
  return out;
}

std::string constraint_line(const Constraint& c) {
  const auto& v = c.bound_value;
  switch (c.bound_kind) {
    case BoundKind::Range:
      return c.parameter_path + " in [" + num(v.at(0).get<double>()) + ", " + num(v.at(1).get<double>()) + "]";
    case BoundKind::EnumMember: return c.parameter_path + " one of " + v.dump();
    case BoundKind::SumToOne: return c.parameter_path + " values sum to 1 (tolerance " + num(v.get<double>()) + ")";
    case BoundKind::MaxCount: return c.parameter_path + " has at most " + v.dump() + " entries";
  }
  return c.parameter_path;
}

std::string target_line(const TargetSpec& t) {
  const char* op = t.kind == TargetKind::Exact ? " = " : t.kind == TargetKind::MinBound ? " >= " : " <= ";
  return t.metric_name + op + num(t.value) + " (" + kind_word(t.kind) + ")";
}

std::string reply_instruction(const std::string& domain) {
  return "Reply with one JSON object of the form {\"domain\": \"" + domain + "\", \"params\": {...}}.";
}

}  // namespace

void EvalConfig::check() const {
  if (attempts_K < 1) throw ContractError("attempts_K must be >= 1");
  if (max_turns < 1) throw ContractError("max_turns must be >= 1");
  if (!(feedback_exact_tol > 0.0 && feedback_exact_tol < 1.0)) throw ContractError("feedback_exact_tol outside (0,1)");
  if (!(feedback_bound_slack > 0.0 && feedback_bound_slack < 1.0)) {
    throw ContractError("feedback_bound_slack outside (0,1)");
  }
}

EvalConfig mode_config(const std::string& mode) {
  EvalConfig c;
  if (mode == "denovo-1" || mode == "opt-1") {
    c.attempts_K = 3, c.max_turns = 1;
  } else if (mode == "denovo-5") {
    c.attempts_K = 3, c.max_turns = 5;
  } else if (mode == "denovo-20" || mode == "opt-20") {
    c.attempts_K = 1, c.max_turns = 20;
  } else {
    throw ContractError("unknown mode '" + mode + "'");
  }
  return c;
}

TaskKind mode_kind(const std::string& mode) {
  mode_config(mode);
  return mode.rfind("opt", 0) == 0 ? TaskKind::Optimization : TaskKind::DeNovo;
}

std::string to_string(ParseCode c) {
  switch (c) {
    case ParseCode::Ok: return "ok";
    case ParseCode::NoObject: return "no_json_object";
    case ParseCode::TypeMismatch: return "type_mismatch";
  }
  return "ok";
}

ParseResult parse_design(const std::string& raw_text, const std::string& domain) {
  ParseResult r;
  std::optional<json> obj;
  for (const auto& block : fenced_blocks(raw_text)) {
    if ((obj = first_object(block))) break;
  }
  if (!obj) obj = first_object(raw_text);
  if (!obj) {
    r.code = ParseCode::NoObject;
    r.errors.push_back("no JSON object found in the reply");
    return r;
  }
  json params = *obj;
  if (obj->contains("params")) {
    if (obj->contains("domain") && obj->at("domain") != domain) {
      r.code = ParseCode::TypeMismatch;
      r.errors.push_back("domain: expected \"" + domain + "\"");
      return r;
    }
    params = obj->at("params");
  }
  if (!params.is_object()) {
    r.code = ParseCode::TypeMismatch;
    r.errors.push_back("params: expected object");
    return r;
  }
  r.errors = get_domain(domain).shape().type_errors(params);
  if (!r.errors.empty()) {
    r.code = ParseCode::TypeMismatch;
    return r;
  }
  r.code = ParseCode::Ok;
  r.design = Design{domain, params};
  return r;
}

std::vector<std::string> validate_design(const Design& design, const Goal& goal) {
  const auto& d = get_domain(goal.domain);
  std::vector<std::string> out;
  for (const auto& key : d.shape().unknown_keys(design.params)) out.push_back("[schema] " + key + ": unexpected field");
  for (auto& v : constraint_violations(design.params, goal.constraints)) out.push_back(std::move(v));
  if (out.empty()) {
    for (auto& v : d.invariant_errors(goal, design.params)) out.push_back("[invariant] " + v);
  }
  return out;
}

FeedbackMessage build_feedback(const Goal& goal, const Outcome& outcome, bool success, const EvalConfig& config) {
  FeedbackMessage f;
  for (const auto& t : goal.targets) {
    const double achieved = outcome.metrics.at(t.metric_name);
    const auto c = check_target(t, achieved, config.feedback_exact_tol, config.feedback_bound_slack);
    f.rows.push_back({t.metric_name, t.kind, t.value, achieved, c.rel_error, c.pass});
    f.n_targets_met += c.pass ? 1 : 0;
  }
  f.reward = base_reward(goal, outcome);
  f.success = success;
  if (success) {
    f.instruction = "All targets are satisfied.";
  } else {
    f.instruction = "Revise the design so every MISS row moves within tolerance (exact targets " +
                    num(100.0 * config.feedback_exact_tol) + "% relative error, bounds " +
                    num(100.0 * config.feedback_bound_slack) + "% slack).";
    if (goal.task_kind == TaskKind::Optimization) {
      f.instruction += " The design must differ from the starting design.";
    }
    f.instruction += " " + reply_instruction(goal.domain);
  }
  return f;
}

std::string render_feedback(const FeedbackMessage& f, int turn) {
  std::ostringstream os;
  os << "Simulation results for turn " << turn << ":\n";
  for (const auto& r : f.rows) {
    os << "- " << r.metric << " [" << kind_word(r.kind) << "] target " << num(r.target) << " achieved "
       << num(r.achieved) << " rel_error " << signed_num(r.rel_error) << " " << (r.pass ? "PASS" : "MISS") << "\n";
  }
  os << "reward " << num(f.reward) << " / 10\n";
  os << "targets_met " << f.n_targets_met << "/" << f.rows.size() << "\n";
  os << "success " << (f.success ? "yes" : "no") << "\n";
  os << f.instruction << "\n";
  return os.str();
}

std::optional<FeedbackMessage> parse_feedback(const std::string& text) {
  FeedbackMessage f;
  bool any = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "-") {
      FeedbackRow r;
      std::string kind, w_target, w_achieved, w_rel, label;
      if (!(ls >> r.metric >> kind >> w_target >> r.target >> w_achieved >> r.achieved >> w_rel >> r.rel_error >> label)) {
        continue;
      }
      if (w_target != "target" || w_achieved != "achieved" || w_rel != "rel_error") continue;
      if (kind == "[exact]") r.kind = TargetKind::Exact;
      else if (kind == "[min]") r.kind = TargetKind::MinBound;
      else if (kind == "[max]") r.kind = TargetKind::MaxBound;
      else continue;
      if (label != "PASS" && label != "MISS") continue;
      r.pass = label == "PASS";
      f.n_targets_met += r.pass ? 1 : 0;
      f.rows.push_back(r);
      any = true;
    } else if (head == "reward") {
      ls >> f.reward;
    } else if (head == "success") {
      std::string v;
      ls >> v;
      f.success = v == "yes";
    }
  }
  if (!any) return std::nullopt;
  return f;
}

std::string render_goal(const TaskRecord& task) {
  const auto& g = task.goal;
  const auto& d = get_domain(g.domain);
  std::ostringstream os;
  os << "Task " << task.task_id << "\n";
  os << "Domain: " << g.domain << ". " << d.summary() << "\n";
  os << "Kind: " << (g.task_kind == TaskKind::DeNovo ? "de novo design" : "optimization of a starting design")
     << "\n";
  os << "Difficulty " << to_string(g.difficulty) << ": exact targets need relative error within "
     << num(100.0 * g.tolerance()) << "%; min/max bounds allow " << num(100.0 * g.bound_slack) << "% slack.\n";
  os << "\nTargets:\n";
  for (const auto& t : g.targets) os << "- " << target_line(t) << "\n";
  os << "\nConstraints:\n";
  for (const auto& c : g.constraints) os << "- [" << to_string(c.bound_kind) << "] " << constraint_line(c) << "\n";
  os << "\nSystem configuration:\n" << g.context.dump() << "\n";
  if (task.starting_design) {
    os << "\nStarting design:\n" << task.starting_design->params.dump() << "\n";
    if (task.starting_outcome) {
      os << "Starting outcome:\n";
      for (const auto& [k, v] : task.starting_outcome->metrics) os << "- " << k << " = " << num(v) << "\n";
    }
    os << "Modify the starting design; an unchanged design does not count.\n";
  }
  os << "\nDesign schema:\n" << d.shape().to_schema().dump() << "\n\n" << reply_instruction(g.domain) << "\n";
  return os.str();
}

std::string render_retry(const ParseResult& parse, const std::vector<std::string>& violations,
                         const std::string& domain, int turn) {
  std::ostringstream os;
  if (!parse.ok()) {
    os << "Turn " << turn << ": the reply could not be parsed (" << to_string(parse.code) << ").\n";
    for (const auto& e : parse.errors) os << "- " << e << "\n";
  } else {
    os << "Turn " << turn << ": the design violates " << violations.size() << " constraint(s).\n";
    for (const auto& v : violations) os << "- " << v << "\n";
  }
  os << "No simulation was run. Design schema:\n"
     << get_domain(domain).shape().to_schema().dump() << "\n"
     << reply_instruction(domain) << "\n";
  return os.str();
}

EvalResult run_task(const TaskRecord& task, const Agent& agent, const EvalConfig& config) {
  config.check();
  const auto& goal = task.goal;
  const auto& domain = get_domain(goal.domain);
  EvalResult res;
  res.task_id = task.task_id;
  res.domain = goal.domain;
  res.level = goal.difficulty;
  res.kind = goal.task_kind;
  res.best_reward = config.penalty_reward;

  const std::string rendering = render_goal(task);
  const json schema = domain.shape().to_schema();

  for (int a = 0; a < config.attempts_K; ++a) {
    AttemptRecord att;
    const auto t_attempt = Clock::now();
    auto log = [&](const char* role, const std::string& text) {
      if (config.keep_transcript) att.transcript.push_back({role, text, ms_since(t_attempt)});
    };
    std::unique_ptr<AgentSession> session;
    try {
      session = agent.open(task, a);
    } catch (const std::exception& e) {
      att.errored = true;
      att.error = e.what();
      res.attempts.push_back(std::move(att));
      continue;
    }
    TurnRequest req{task.task_id, a, 1, rendering, schema, std::nullopt};
    for (int turn = 1; turn <= config.max_turns; ++turn) {
      req.turn = turn;
      log("harness", req.message());
      TurnRecord rec;
      rec.turn = turn;
      const auto t_gen = Clock::now();
      AgentReply reply;
      try {
        reply = session->respond(req);
      } catch (const std::exception& e) {
        att.errored = true;
        att.error = e.what();
        res.generation_ms += ms_since(t_gen);
        break;
      }
      rec.generation_ms = ms_since(t_gen);
      res.generation_ms += rec.generation_ms;
      rec.raw_response = reply.raw_text;
      rec.protocol_error = reply.protocol_error;
      log("agent", reply.raw_text);

      const auto parsed = parse_design(reply.raw_text, goal.domain);
      rec.parse_ok = parsed.ok();
      rec.parse_code = parsed.code;
      if (parsed.ok()) {
        rec.violations = validate_design(*parsed.design, goal);
        rec.valid_ok = rec.violations.empty();
      } else {
        rec.violations = parsed.errors;
      }
      if (rec.valid_ok) {
        const auto t_or = Clock::now();
        try {
          rec.outcome = run_oracle(domain, goal, *parsed.design);
        } catch (const std::exception& e) {
          rec.valid_ok = false;
          rec.violations.push_back(std::string("[oracle] design rejected: ") + e.what());
        }
        rec.oracle_ms = ms_since(t_or);
        res.oracle_ms += rec.oracle_ms;
        ++res.oracle_calls;
      }
      if (!rec.valid_ok) {
        rec.reward = config.penalty_reward;
        res.best_reward = std::max(res.best_reward, config.penalty_reward);
        req.feedback = render_retry(parsed, rec.violations, goal.domain, turn);
        att.turns.push_back(std::move(rec));
        continue;
      }
      const bool ok = success_predicate(goal, *rec.outcome, task.starting_design, *parsed.design);
      rec.success = ok;
      const auto fb = build_feedback(goal, *rec.outcome, ok, config);
      rec.reward = fb.reward;
      res.best_reward = std::max(res.best_reward, fb.reward);
      req.feedback = render_feedback(fb, turn);
      att.turns.push_back(std::move(rec));
      if (ok) {
        att.success = true;
        break;
      }
    }
    res.task_success = res.task_success || att.success;
    res.attempts.push_back(std::move(att));
  }
  return res;
}

std::vector<EvalResult> run_tasks(const std::vector<TaskRecord>& tasks, const Agent& agent,
                                  const EvalConfig& config, int jobs, const std::atomic<bool>* stop,
                                  const std::function<void(const EvalResult&)>& on_result) {
  config.check();
  if (!agent.concurrent()) jobs = 1;
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::optional<EvalResult>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      if (stop && stop->load()) return;
      const auto i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      auto r = run_task(tasks[i], agent, config);
      std::lock_guard<std::mutex> lock(mu);
      if (on_result) on_result(r);
      slots[i] = std::move(r);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<EvalResult> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

json to_json(const EvalResult& r, bool with_transcript) {
  json attempts = json::array();
  for (const auto& a : r.attempts) {
    json turns = json::array();
    for (const auto& t : a.turns) {
      json tj = {{"turn", t.turn},
                 {"raw_response", t.raw_response},
                 {"parse_ok", t.parse_ok},
                 {"parse_code", to_string(t.parse_code)},
                 {"valid_ok", t.valid_ok},
                 {"violations", t.violations},
                 {"generation_ms", t.generation_ms},
                 {"oracle_ms", t.oracle_ms}};
      if (t.protocol_error) tj["protocol_error"] = *t.protocol_error;
      if (t.outcome) tj["outcome"] = to_json(*t.outcome);
      if (t.reward) tj["reward"] = *t.reward;
      if (t.success) tj["success"] = *t.success;
      turns.push_back(std::move(tj));
    }
    json aj = {{"success", a.success}, {"errored", a.errored}, {"turns", turns}};
    if (a.errored) aj["error"] = a.error;
    if (with_transcript) {
      json tr = json::array();
      for (const auto& m : a.transcript) tr.push_back({{"role", m.role}, {"text", m.text}, {"t_ms", m.t_ms}});
      aj["transcript"] = tr;
    }
    attempts.push_back(std::move(aj));
  }
  return {{"schema_version", 1},
          {"task_id", r.task_id},
          {"domain", r.domain},
          {"difficulty", to_string(r.level)},
          {"task_kind", to_string(r.kind)},
          {"task_success", r.task_success},
          {"best_reward", r.best_reward},
          {"oracle_calls", r.oracle_calls},
          {"timing", {{"generation_ms", r.generation_ms}, {"oracle_ms", r.oracle_ms}, {"active_ms", r.active_ms()}}},
          {"attempts", attempts}};
}

EvalResult eval_result_from_json(const json& j) {
  EvalResult r;
  r.task_id = j.at("task_id").get<std::string>();
  r.domain = j.at("domain").get<std::string>();
  r.level = level_from_string(j.at("difficulty").get<std::string>());
  r.kind = task_kind_from_string(j.at("task_kind").get<std::string>());
  r.task_success = j.at("task_success").get<bool>();
  r.best_reward = j.at("best_reward").get<double>();
  r.oracle_calls = j.value("oracle_calls", std::size_t{0});
  if (j.contains("timing")) {
    r.generation_ms = j["timing"].value("generation_ms", 0.0);
    r.oracle_ms = j["timing"].value("oracle_ms", 0.0);
  }
  for (const auto& aj : j.at("attempts")) {
    AttemptRecord a;
    a.success = aj.value("success", false);
    a.errored = aj.value("errored", false);
    a.error = aj.value("error", std::string());
    for (const auto& tj : aj.at("turns")) {
      TurnRecord t;
      t.turn = tj.at("turn").get<int>();
      t.raw_response = tj.value("raw_response", std::string());
      t.parse_ok = tj.value("parse_ok", false);
      const auto code = tj.value("parse_code", to_string(t.parse_ok ? ParseCode::Ok : ParseCode::NoObject));
      for (auto c : {ParseCode::Ok, ParseCode::NoObject, ParseCode::TypeMismatch}) {
        if (to_string(c) == code) t.parse_code = c;
      }
      if (tj.contains("protocol_error")) t.protocol_error = tj["protocol_error"].get<std::string>();
      t.valid_ok = tj.value("valid_ok", false);
      t.violations = tj.value("violations", std::vector<std::string>{});
      if (tj.contains("outcome")) t.outcome = outcome_from_json(tj["outcome"]);
      if (tj.contains("reward")) t.reward = tj["reward"].get<double>();
      if (tj.contains("success")) t.success = tj["success"].get<bool>();
      t.generation_ms = tj.value("generation_ms", 0.0);
      t.oracle_ms = tj.value("oracle_ms", 0.0);
      a.turns.push_back(std::move(t));
    }
    if (aj.contains("transcript")) {
      for (const auto& m : aj["transcript"]) {
        a.transcript.push_back({m.at("role").get<std::string>(), m.at("text").get<std::string>(), m.value("t_ms", 0.0)});
      }
    }
    r.attempts.push_back(std::move(a));
  }
  return r;
}

AggregateReport aggregate(const std::vector<EvalResult>& results, const std::vector<std::string>& domain_set) {
  AggregateReport rep;
  std::map<std::string, std::vector<const EvalResult*>> by_domain;
  for (const auto& r : results) by_domain[r.domain].push_back(&r);
  double total = 0.0;
  for (const auto& dom : domain_set) {
    const auto it = by_domain.find(dom);
    if (it == by_domain.end() || it->second.empty()) {
      rep.warnings.push_back("domain '" + dom + "' has no results; excluded");
      continue;
    }
    DomainStats s;
    std::map<Level, std::pair<int, int>> lvl;
    for (const auto* r : it->second) {
      int turns = 0, parsed = 0, valid = 0;
      for (const auto& a : r->attempts) {
        for (const auto& t : a.turns) {
          ++turns;
          parsed += t.parse_ok ? 1 : 0;
          valid += t.valid_ok ? 1 : 0;
        }
      }
      s.parse_rate += turns ? 100.0 * parsed / turns : 0.0;
      s.validity_rate += turns ? 100.0 * valid / turns : 0.0;
      s.success_rate += r->task_success ? 100.0 : 0.0;
      s.mean_best_reward += r->best_reward;
      auto& [ok, n] = lvl[r->level];
      ok += r->task_success ? 1 : 0;
      ++n;
      ++s.n_tasks;
    }
    const double n = static_cast<double>(s.n_tasks);
    s.parse_rate /= n;
    s.validity_rate /= n;
    s.success_rate /= n;
    s.mean_best_reward /= n;
    for (const auto& [l, p] : lvl) s.success_by_level[l] = 100.0 * p.first / p.second;
    total += s.success_rate;
    rep.domains[dom] = s;
    rep.domain_set.push_back(dom);
  }
  rep.overall_score = rep.domain_set.empty() ? 0.0 : total / static_cast<double>(rep.domain_set.size());
  return rep;
}

json to_json(const AggregateReport& r) {
  json doms = json::object();
  for (const auto& [name, s] : r.domains) {
    json lv = json::object();
    for (const auto& [l, v] : s.success_by_level) lv[to_string(l)] = v;
    doms[name] = {{"n_tasks", s.n_tasks},
                  {"parse_rate", s.parse_rate},
                  {"validity_rate", s.validity_rate},
                  {"success_rate", s.success_rate},
                  {"mean_best_reward", s.mean_best_reward},
                  {"success_by_level", lv}};
  }
  return {{"schema_version", 1},
          {"domains", doms},
          {"domain_set", r.domain_set},
          {"overall_score", r.overall_score},
          {"warnings", r.warnings}};
}

std::string render_table(const AggregateReport& r) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %5s %8s %8s %8s %8s  %6s %6s %6s %6s\n", "domain", "tasks", "parse%",
                "valid%", "success%", "reward", "L1", "L2", "L3", "L4");
  os << buf;
  for (const auto& dom : r.domain_set) {
    const auto& s = r.domains.at(dom);
    auto lv = [&](Level l) {
      auto it = s.success_by_level.find(l);
      return it == s.success_by_level.end() ? std::string("-") : num(it->second);
    };
    std::snprintf(buf, sizeof buf, "%-14s %5zu %8.1f %8.1f %8.1f %8.2f  %6s %6s %6s %6s\n", dom.c_str(), s.n_tasks,
                  s.parse_rate, s.validity_rate, s.success_rate, s.mean_best_reward, lv(Level::L1).c_str(),
                  lv(Level::L2).c_str(), lv(Level::L3).c_str(), lv(Level::L4).c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "overall score %.2f over %zu domain(s)\n", r.overall_score, r.domain_set.size());
  os << buf;
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

std::vector<std::string> shared_domains(const std::vector<std::vector<EvalResult>>& runs) {
  std::vector<std::string> out;
  for (const auto& dom : domain_ids()) {
    const bool everywhere = !runs.empty() && std::all_of(runs.begin(), runs.end(), [&](const auto& run) {
      return std::any_of(run.begin(), run.end(), [&](const EvalResult& r) { return r.domain == dom; });
    });
    if (everywhere) out.push_back(dom);
  }
  return out;
}

std::string render_comparison(const std::vector<std::string>& names, const std::vector<std::vector<EvalResult>>& runs) {
  if (names.size() != runs.size()) throw ContractError("one name per result set");
  std::vector<AggregateReport> full;
  for (const auto& run : runs) full.push_back(aggregate(run, domain_ids()));
  const auto core = shared_domains(runs);
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s", "domain");
  os << buf;
  for (const auto& n : names) {
    std::snprintf(buf, sizeof buf, " %20s", n.substr(0, 20).c_str());
    os << buf;
  }
  os << "\n";
  for (const auto& dom : domain_ids()) {
    const bool any = std::any_of(full.begin(), full.end(), [&](const auto& r) { return r.domains.count(dom) > 0; });
    if (!any) continue;
    std::snprintf(buf, sizeof buf, "%-14s", dom.c_str());
    os << buf;
    for (const auto& r : full) {
      const auto it = r.domains.find(dom);
      if (it == r.domains.end()) {
        std::snprintf(buf, sizeof buf, " %20s", "-");
      } else {
        std::snprintf(buf, sizeof buf, " %20.1f", it->second.success_rate);
      }
      os << buf;
    }
    os << "\n";
  }
  std::snprintf(buf, sizeof buf, "%-14s", "shared-core");
  os << buf;
  for (const auto& run : runs) {
    std::snprintf(buf, sizeof buf, " %20.1f", aggregate(run, core).overall_score);
    os << buf;
  }
  os << "\nshared core: " << core.size() << " domain(s)";
  for (const auto& d : core) os << " " << d;
  os << "\n";
  return os.str();
}

}  // namespace invdes
