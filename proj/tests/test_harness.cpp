#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "invdes/agents.hpp"
#include "invdes/domain.hpp"
#include "invdes/harness.hpp"
#include "invdes/taskgen.hpp"

using namespace invdes;

namespace {

// Set INVDES_UPDATE_GOLDEN=1 to rewrite the files instead of comparing.
void check_golden(const std::string& name, const std::string& actual) {
  const auto path = std::filesystem::path(INVDES_GOLDEN_DIR) / name;
  if (std::getenv("INVDES_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == actual);
}

// Replies from a fixed list, one per turn; counts sessions and turns.
class ScriptAgent final : public Agent {
 public:
  explicit ScriptAgent(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string name() const override { return "script"; }
  std::unique_ptr<AgentSession> open(const TaskRecord&, int) const override {
    ++sessions;
    struct S final : AgentSession {
      const ScriptAgent* a;
      std::size_t i = 0;
      explicit S(const ScriptAgent* owner) : a(owner) {}
      AgentReply respond(const TurnRequest& r) override {
        ++a->turns;
        a->last_feedback = r.feedback.value_or("");
        return {a->replies_[std::min(i++, a->replies_.size() - 1)], std::nullopt};
      }
    };
    return std::make_unique<S>(this);
  }
  bool concurrent() const override { return false; }
  mutable int sessions = 0;
  mutable int turns = 0;
  mutable std::string last_feedback;

 private:
  std::vector<std::string> replies_;
};

GeneratedTask reactor_task(Level level = Level::L2, TaskKind kind = TaskKind::DeNovo) {
  return forward_generate_goal("reactor", level, kind, 4100);
}

Goal exact_goal(Level level) {
  Goal g;
  g.domain = "reactor";
  g.difficulty = level;
  g.targets = {{"conversion", TargetKind::Exact, 10.0}};
  return g;
}

}  // namespace

TEST_CASE("mode mapping") {
  const std::map<std::string, std::pair<int, int>> expect{
      {"denovo-1", {3, 1}}, {"denovo-5", {3, 5}}, {"denovo-20", {1, 20}}, {"opt-1", {3, 1}}, {"opt-20", {1, 20}}};
  for (const auto& [mode, kt] : expect) {
    const auto c = mode_config(mode);
    CHECK(c.attempts_K == kt.first);
    CHECK(c.max_turns == kt.second);
  }
  CHECK(mode_kind("opt-20") == TaskKind::Optimization);
  CHECK(mode_kind("denovo-5") == TaskKind::DeNovo);
  CHECK_THROWS_AS(mode_config("denovo-3"), ContractError);
}

TEST_SUITE("parse") {
  TEST_CASE("fenced block wins over surrounding objects") {
    const auto r = parse_design("noise {\"dose_mg\": 1}\n```json\n{\"domain\": \"pkpd\", \"params\": "
                                "{\"dose_mg\": 200, \"frequency_hours\": 12}}\n```\n",
                                "pkpd");
    REQUIRE(r.ok());
    CHECK(r.design->params.at("dose_mg") == 200);
  }

  TEST_CASE("bare object embedded in prose") {
    const auto r = parse_design("I propose {\"dose_mg\": 150.5, \"frequency_hours\": 8} as the regimen.", "pkpd");
    REQUIRE(r.ok());
    CHECK(r.design->params.at("frequency_hours") == 8);
  }

  TEST_CASE("braces inside strings do not confuse extraction") {
    const auto r = parse_design("{\"note\": \"a } b\"} then {\"dose_mg\": 1, \"frequency_hours\": 4}", "pkpd");
    CHECK(r.code == ParseCode::TypeMismatch);  // the first object is the note
  }

  TEST_CASE("no object") {
    CHECK(parse_design("I cannot help with that.", "pkpd").code == ParseCode::NoObject);
    CHECK(parse_design("{\"dose_mg\": ", "pkpd").code == ParseCode::NoObject);
  }

  TEST_CASE("type mismatches and wrong domains") {
    CHECK(parse_design("{\"dose_mg\": \"lots\", \"frequency_hours\": 12}", "pkpd").code == ParseCode::TypeMismatch);
    CHECK(parse_design("{\"frequency_hours\": 12}", "pkpd").code == ParseCode::TypeMismatch);
    CHECK(parse_design("{\"domain\": \"alloy\", \"params\": {\"dose_mg\": 1, \"frequency_hours\": 12}}", "pkpd").code ==
          ParseCode::TypeMismatch);
    CHECK(parse_design("{\"domain\": \"pkpd\", \"params\": [1, 2]}", "pkpd").code == ParseCode::TypeMismatch);
  }
}

TEST_CASE("feedback passes at 20% while the L4 task still fails") {
  const auto g = exact_goal(Level::L4);
  const Outcome o{"reactor", {{"conversion", 12.0}}};
  const bool ok = success_predicate(g, o, std::nullopt, {"reactor", json::object()});
  CHECK_FALSE(ok);
  const auto fb = build_feedback(g, o, ok, EvalConfig{});
  REQUIRE(fb.rows.size() == 1);
  CHECK(fb.rows[0].pass);
  CHECK(fb.n_targets_met == 1);
  CHECK_FALSE(fb.success);
}

TEST_CASE("feedback renders byte-stably and parses back") {
  Goal g;
  g.domain = "reactor";
  g.difficulty = Level::L3;
  g.targets = {{"conversion", TargetKind::Exact, 0.8}, {"yield", TargetKind::MinBound, 0.4},
               {"productivity", TargetKind::MaxBound, 1.5}};
  const Outcome o{"reactor", {{"conversion", 0.7123456}, {"yield", 0.35}, {"productivity", 1.9}}};
  const auto fb = build_feedback(g, o, false, EvalConfig{});
  const auto text = render_feedback(fb, 3);
  check_golden("feedback_reactor_l3.txt", text);

  const auto back = parse_feedback(text);
  REQUIRE(back);
  REQUIRE(back->rows.size() == 3);
  CHECK(back->rows[1].kind == TargetKind::MinBound);
  CHECK(back->rows[0].pass == fb.rows[0].pass);
  CHECK(back->reward == doctest::Approx(fb.reward).epsilon(1e-5));
  CHECK_FALSE(parse_feedback("nothing to see"));

  g.task_kind = TaskKind::Optimization;
  const Outcome hit{"reactor", {{"conversion", 0.79}, {"yield", 0.41}, {"productivity", 1.2}}};
  REQUIRE(targets_met(g, hit, g.tolerance()));
  check_golden("feedback_reactor_success.txt", render_feedback(build_feedback(g, hit, true, EvalConfig{}), 1));
}

TEST_CASE("goal and retry renderings are byte-stable") {
  auto pk = forward_generate_goal("pkpd", Level::L2, TaskKind::Optimization, 61201).record;
  pk.task_id = "pkpd-opt-L2-01";
  check_golden("goal_pkpd_opt_l2.txt", render_goal(pk));
  auto al = forward_generate_goal("alloy", Level::L1, TaskKind::DeNovo, 80100).record;
  al.task_id = "alloy-denovo-L1-00";
  check_golden("goal_alloy_l1.txt", render_goal(al));
  check_golden("retry_no_object.txt", render_retry(parse_design("no idea", "pkpd"), {}, "pkpd", 2));
  const auto alloy = forward_generate_goal("alloy", Level::L1, TaskKind::DeNovo, 80100).record.goal;
  const Design bad{"alloy", {{"composition", {{"Fe", 0.5}, {"Ni", 0.4}}}, {"processing_temp_K", 1200.0}}};
  const auto v = validate_design(bad, alloy);
  CHECK(v.size() >= 2);
  check_golden("retry_alloy_violations.txt", render_retry(parse_design(design_reply(bad), "alloy"), v, "alloy", 1));
}

TEST_CASE("replay agent solves in one oracle call per attempt") {
  const auto gen = reactor_task(Level::L3);
  const auto agent = make_replay_agent({{gen.record.task_id, gen.generating_design}});
  auto cfg = mode_config("denovo-5");
  const auto before = oracle_call_count();
  const auto r = run_task(gen.record, *agent, cfg);
  CHECK(r.task_success);
  CHECK(r.attempts.size() == 3);
  for (const auto& a : r.attempts) {
    CHECK(a.success);
    CHECK(a.turns.size() == 1);
  }
  CHECK(r.oracle_calls == 3);
  CHECK(oracle_call_count() - before == 3);
  CHECK(r.best_reward >= 10.0 * (1.0 - level_tolerance(Level::L3)));
}

TEST_CASE("unparsable replies consume turns without oracle calls") {
  const auto gen = reactor_task();
  ScriptAgent agent({"no json here"});
  const auto cfg = mode_config("denovo-5");
  const auto r = run_task(gen.record, agent, cfg);
  CHECK(agent.sessions == 3);
  CHECK(agent.turns == 15);
  CHECK(r.oracle_calls == 0);
  CHECK_FALSE(r.task_success);
  CHECK(r.best_reward == cfg.penalty_reward);
  CHECK(agent.last_feedback.find("could not be parsed") != std::string::npos);
  for (const auto& a : r.attempts)
    for (const auto& t : a.turns) CHECK(t.reward == cfg.penalty_reward);
}

TEST_CASE("constraint violations consume turns without oracle calls") {
  const auto gen = reactor_task();
  const Design outside{"reactor", {{"volume_L", 1e6}, {"flow_L_per_s", 1.0}, {"feed_conc_mol_L", 1.0},
                                    {"temperature_K", 350.0}, {"coolant_K", 320.0}}};
  ScriptAgent agent({design_reply(outside)});
  const auto r = run_task(gen.record, agent, mode_config("denovo-20"));
  CHECK(agent.turns == 20);
  CHECK(r.oracle_calls == 0);
  CHECK(r.attempts[0].turns[0].parse_ok);
  CHECK_FALSE(r.attempts[0].turns[0].valid_ok);
  CHECK(agent.last_feedback.find("volume_L") != std::string::npos);
}

TEST_CASE("multi-turn stops at the first success") {
  const auto gen = reactor_task();
  ScriptAgent agent({"nothing", "still nothing", design_reply(gen.generating_design), "unreachable"});
  const auto r = run_task(gen.record, agent, mode_config("denovo-20"));
  CHECK(r.task_success);
  CHECK(r.attempts[0].turns.size() == 3);
  CHECK(r.oracle_calls == 1);
}

TEST_CASE("optimization tasks reject the unchanged starting design") {
  const auto gen = reactor_task(Level::L1, TaskKind::Optimization);
  REQUIRE(gen.record.starting_design);
  ScriptAgent agent({design_reply(*gen.record.starting_design)});
  const auto r = run_task(gen.record, agent, mode_config("opt-1"));
  CHECK_FALSE(r.task_success);
  CHECK(r.oracle_calls == 3);
}

TEST_CASE("transport errors mark the attempt and move on") {
  class Broken final : public Agent {
   public:
    std::string name() const override { return "broken"; }
    std::unique_ptr<AgentSession> open(const TaskRecord&, int) const override {
      struct S final : AgentSession {
        AgentReply respond(const TurnRequest&) override { throw AgentError("pipe closed"); }
      };
      return std::make_unique<S>();
    }
  } agent;
  const auto r = run_task(reactor_task().record, agent, mode_config("denovo-1"));
  CHECK(r.attempts.size() == 3);
  for (const auto& a : r.attempts) {
    CHECK(a.errored);
    CHECK(a.error == "pipe closed");
  }
}

TEST_CASE("a larger turn budget never loses a success") {
  std::vector<TaskRecord> tasks;
  for (std::uint64_t s = 0; s < 6; ++s) tasks.push_back(forward_generate_goal("heatx", Level::L1, TaskKind::DeNovo, 50100 + s).record);
  const auto agent = make_hillclimb_agent(0.1, 3);
  EvalConfig shorter{1, 4}, longer{1, 12};
  const auto a = run_tasks(tasks, *agent, shorter, 1);
  const auto b = run_tasks(tasks, *agent, longer, 1);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (a[i].task_success) CHECK(b[i].task_success);
    CHECK(b[i].best_reward >= a[i].best_reward);
  }
}

TEST_CASE("run_tasks preserves order and honours the stop flag") {
  std::vector<TaskRecord> tasks;
  for (int i = 0; i < 5; ++i) tasks.push_back(forward_generate_goal("pkpd", Level::L1, TaskKind::DeNovo, 60100 + i).record);
  const auto agent = make_random_agent(20, 1);
  int seen = 0;
  const auto rs = run_tasks(tasks, *agent, mode_config("denovo-1"), 3, nullptr, [&](const EvalResult&) { ++seen; });
  CHECK(seen == 5);
  for (std::size_t i = 0; i < tasks.size(); ++i) CHECK(rs[i].task_id == tasks[i].task_id);
  std::atomic<bool> stop{true};
  CHECK(run_tasks(tasks, *agent, mode_config("denovo-1"), 2, &stop).empty());
}

TEST_CASE("results round-trip through JSON") {
  const auto gen = reactor_task();
  const auto agent = make_random_agent(20, 4);
  EvalConfig cfg = mode_config("denovo-5");
  cfg.keep_transcript = true;
  const auto r = run_task(gen.record, *agent, cfg);
  const auto j = to_json(r, true);
  CHECK(to_json(eval_result_from_json(j), true) == j);
  CHECK_FALSE(r.attempts[0].transcript.empty());
  CHECK(r.attempts[0].transcript[0].role == "harness");
}

TEST_SUITE("aggregate") {
  EvalResult result(const std::string& dom, bool ok, Level l = Level::L1) {
    EvalResult r;
    r.task_id = dom + "-x";
    r.domain = dom;
    r.level = l;
    r.task_success = ok;
    r.best_reward = ok ? 9.0 : 1.0;
    AttemptRecord a;
    TurnRecord t;
    t.parse_ok = true;
    t.valid_ok = ok;
    a.turns.push_back(t);
    r.attempts.push_back(a);
    return r;
  }

  std::vector<EvalResult> rate(const std::string& dom, int ok, int n) {
    std::vector<EvalResult> v;
    for (int i = 0; i < n; ++i) v.push_back(result(dom, i < ok));
    return v;
  }

  TEST_CASE("overall score is the unweighted mean of domain success rates") {
    auto rs = rate("alloy", 2, 5);
    const auto more = rate("ssa", 2, 10);
    rs.insert(rs.end(), more.begin(), more.end());
    const auto rep = aggregate(rs, {"alloy", "ssa"});
    CHECK(rep.domains.at("alloy").success_rate == doctest::Approx(40.0));
    CHECK(rep.domains.at("ssa").success_rate == doctest::Approx(20.0));
    CHECK(rep.overall_score == doctest::Approx(30.0));
    CHECK(rep.domains.at("alloy").validity_rate == doctest::Approx(40.0));
  }

  TEST_CASE("missing domains are excluded with a warning") {
    const auto rep = aggregate(rate("alloy", 1, 2), {"alloy", "quantum"});
    CHECK(rep.domain_set == std::vector<std::string>{"alloy"});
    CHECK(rep.warnings.size() == 1);
    CHECK(rep.overall_score == doctest::Approx(50.0));
  }

  TEST_CASE("comparison tables use the shared core") {
    auto a = rate("alloy", 1, 2);
    const auto q = rate("quantum", 2, 2);
    a.insert(a.end(), q.begin(), q.end());
    const auto b = rate("alloy", 2, 2);
    CHECK(shared_domains({a, b}) == std::vector<std::string>{"alloy"});
    const auto table = render_comparison({"first", "second"}, {a, b});
    CHECK(table.find("shared-core") != std::string::npos);
    CHECK(table.find("quantum") != std::string::npos);
  }
}
