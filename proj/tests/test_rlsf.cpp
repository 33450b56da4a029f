#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "invdes/agents.hpp"
#include "invdes/domain.hpp"
#include "invdes/rlsf.hpp"
#include "invdes/taskgen.hpp"

using namespace invdes;

TEST_SUITE("advantages") {
  TEST_CASE("three-sample group") {
    const auto a = group_advantages({1.0, 2.0, 3.0});
    CHECK(a[0] == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(a[1] == doctest::Approx(0.0));
    CHECK(a[2] == doctest::Approx(1.2247).epsilon(1e-4));
  }

  TEST_CASE("equal rewards give zero advantage") {
    for (double a : group_advantages({4.0, 4.0, 4.0, 4.0})) CHECK(a == 0.0);
  }

  TEST_CASE("contract") {
    CHECK_THROWS_AS(group_advantages({1.0}), ContractError);
    CHECK_THROWS_AS(group_advantages({1.0, 2.0}, 0.0), ContractError);
  }

  TEST_CASE("zero mean, unit spread and permutation equivariance") {
    CounterRng rng{8};
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> r(static_cast<std::size_t>(rng.integer(2, 16)));
      for (auto& x : r) x = rng.uniform(-5.0, 20.0);
      const auto a = group_advantages(r);
      const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
      CHECK(std::abs(mean) < 1e-9);
      double var = 0.0;
      for (double x : a) var += x * x;
      CHECK(var / static_cast<double>(a.size()) == doctest::Approx(1.0).epsilon(1e-4));  // epsilon shrinks tight groups
      auto rr = r;
      std::reverse(rr.begin(), rr.end());
      const auto ar = group_advantages(rr);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(ar[i] == doctest::Approx(a[a.size() - 1 - i]));
    }
  }
}

TEST_SUITE("surrogate") {
  TEST_CASE("clip cases") {
    CHECK(clipped_objective_term(1.5, 1.0, 0.2) == doctest::Approx(1.2));
    CHECK(clipped_objective_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
    CHECK(clipped_objective_term(1.0, 0.7, 0.2) == doctest::Approx(0.7));
    CHECK(clipped_objective_term(1.0, -0.3, 0.2) == doctest::Approx(-0.3));
    CHECK_THROWS_AS(clipped_objective_term(0.0, 1.0, 0.2), ContractError);
    CHECK_THROWS_AS(clipped_objective_term(1.0, 1.0, 1.0), ContractError);
  }

  TEST_CASE("the clipped term never exceeds the unclipped one") {
    CounterRng rng{9};
    for (int i = 0; i < 1000; ++i) {
      const double rho = rng.uniform(0.05, 3.0), adv = rng.uniform(-3.0, 3.0), eps = rng.uniform(0.01, 0.9);
      CHECK(clipped_objective_term(rho, adv, eps) <= rho * adv + 1e-12);
    }
  }

  TEST_CASE("k3 estimator is non-negative and zero at equality") {
    CHECK(kl_k3(-1.3, -1.3) == 0.0);
    CounterRng rng{10};
    for (int i = 0; i < 200; ++i) CHECK(kl_k3(rng.uniform(-8.0, 0.0), rng.uniform(-8.0, 0.0)) >= 0.0);
  }
}

TEST_SUITE("shaped reward") {
  Goal two_targets() {
    Goal g;
    g.domain = "reactor";
    g.difficulty = Level::L2;
    g.targets = {{"conversion", TargetKind::Exact, 0.5}, {"yield", TargetKind::Exact, 0.2}};
    return g;
  }

  TEST_CASE("a full hit earns base, credits and the bonus") {
    RewardConfig cfg;
    cfg.per_target_credit = 1.5;
    const Outcome hit{"reactor", {{"conversion", 0.5}, {"yield", 0.2}}};
    CHECK(shaped_reward(two_targets(), {"reactor", json::object()}, hit, cfg) == doctest::Approx(10.0 + 3.0 + 5.0));
  }

  TEST_CASE("partial credit uses the feedback tolerance") {
    const Outcome near{"reactor", {{"conversion", 0.59}, {"yield", 0.5}}};
    const auto g = two_targets();
    const double base = base_reward(g, near);
    CHECK(shaped_reward(g, {"reactor", json::object()}, near, {}) == doctest::Approx(base + 1.0));
  }

  TEST_CASE("moving a metric toward its target never lowers the reward") {
    CounterRng rng{12};
    const auto g = two_targets();
    for (int i = 0; i < 300; ++i) {
      const double y = rng.uniform(0.0, 1.0);
      const double far = rng.uniform(0.0, 2.0);
      const double closer = 0.5 + (far - 0.5) * rng.uniform(0.0, 1.0);
      const Outcome a{"reactor", {{"conversion", far}, {"yield", y}}};
      const Outcome b{"reactor", {{"conversion", closer}, {"yield", y}}};
      CHECK(shaped_reward(g, {"reactor", json::object()}, b, {}) >=
            shaped_reward(g, {"reactor", json::object()}, a, {}) - 1e-12);
    }
  }

  TEST_CASE("negative weights are rejected") {
    RewardConfig cfg;
    cfg.success_bonus = -1.0;
    CHECK_THROWS_AS(cfg.check(), ContractError);
  }
}

TEST_SUITE("rollout") {
  std::vector<TaskRecord> tasks(int m) {
    std::vector<TaskRecord> v;
    for (int i = 0; i < m; ++i) {
      auto r = forward_generate_goal("pkpd", Level::L1, TaskKind::DeNovo, 60100 + i).record;
      r.task_id = "pk" + std::to_string(i);
      v.push_back(r);
    }
    return v;
  }

  TEST_CASE("M x K oracle calls and the diversity bonus on first occurrences") {
    const auto ts = tasks(3);
    const Sampler same = [](const TaskRecord&, std::uint64_t, int, int k) {
      return k < 3 ? std::string("{\"dose_mg\": 100, \"frequency_hours\": 12}")
                   : std::string("{\"dose_mg\": 300, \"frequency_hours\": 8}");
    };
    const auto before = oracle_call_count();
    const auto gs = rollout_batch(ts, same, 4, 0, {}, 2);
    CHECK(oracle_call_count() - before == 12);
    REQUIRE(gs.size() == 3);
    for (const auto& g : gs) {
      CHECK(g.unique_flags == std::vector<bool>{true, false, false, true});
      CHECK(g.rewards[0] == doctest::Approx(g.rewards[1] + 0.5));
      CHECK(g.rewards[1] == g.rewards[2]);
      CHECK(to_json(g)["advantages"].size() == 4);
    }
  }

  TEST_CASE("invalid samples take the penalty without an oracle call") {
    const auto ts = tasks(2);
    const Sampler bad = [](const TaskRecord&, std::uint64_t, int, int k) {
      return k == 0 ? std::string("no design") : std::string("{\"dose_mg\": 1e9, \"frequency_hours\": 12}");
    };
    const auto before = oracle_call_count();
    const auto gs = rollout_batch(ts, bad, 2, 0);
    CHECK(oracle_call_count() == before);
    for (const auto& g : gs) {
      CHECK(g.valid_flags == std::vector<bool>{false, false});
      CHECK(g.rewards == std::vector<double>{0.0, 0.0});
    }
    std::ostringstream os;
    CHECK(export_sft(gs, -1.0, os) == 0);
  }

  TEST_CASE("sampling is reproducible and SFT export filters by reward") {
    const auto ts = tasks(4);
    const Sampler sampler = [&](const TaskRecord& t, std::uint64_t seed, int, int k) {
      auto s = make_random_agent(20, seed)->open(t, k);
      return s->respond({t.task_id, k, 1, "", json::object(), std::nullopt}).raw_text;
    };
    const auto a = rollout_batch(ts, sampler, 5, 11, {}, 1);
    const auto b = rollout_batch(ts, sampler, 5, 11, {}, 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_json(a[i]) == to_json(b[i]));
    std::ostringstream all, some;
    const auto n_all = export_sft(a, -1.0, all);
    CHECK(n_all == 20);
    const auto n_some = export_sft(a, 12.0, some);
    CHECK(n_some <= n_all);
    std::istringstream lines(some.str());
    for (std::string line; std::getline(lines, line);) CHECK(json::parse(line).at("reward").get<double>() > 12.0);
    CHECK_THROWS_AS(rollout_batch(ts, sampler, 1, 0), ContractError);
  }
}

TEST_SUITE("cem") {
  TaskRecord reactor_l1(std::uint64_t seed) {
    auto r = forward_generate_goal("reactor", Level::L1, TaskKind::DeNovo, seed).record;
    r.task_id = "reactor-" + std::to_string(seed);
    return r;
  }

  TEST_CASE("deterministic with a non-decreasing running best") {
    CemConfig cfg;
    cfg.stop_on_success = false;
    cfg.iterations = 5;
    cfg.population = 20;
    const auto a = cem_optimize(reactor_l1(40101), cfg);
    const auto b = cem_optimize(reactor_l1(40101), cfg);
    CHECK(a.trace == b.trace);
    CHECK(a.oracle_calls == 100);
    CHECK(a.iterations_run == 5);
    for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] >= a.trace[i - 1]);
    CHECK(a.best_reward == a.trace.back());
  }

  TEST_CASE("stops at the first success and keeps within budget") {
    int solved = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto r = cem_optimize(reactor_l1(40100 + s), {});
      CHECK(r.oracle_calls <= 500);
      solved += r.success ? 1 : 0;
      if (r.success) CHECK(static_cast<int>(r.trace.size()) == r.iterations_run);
    }
    CHECK(solved >= 4);
  }

  TEST_CASE("elite fraction 1 and discrete domains") {
    CemConfig cfg;
    cfg.elite_frac = 1.0;
    cfg.iterations = 3;
    cfg.population = 10;
    auto t = forward_generate_goal("perturbation", Level::L1, TaskKind::DeNovo, 90100).record;
    t.task_id = "pert";
    const auto r = cem_optimize(t, cfg);
    CHECK(r.oracle_calls <= 30);
    CHECK(validation_errors(get_domain("perturbation"), t.goal, r.best_design.params).empty());
    cfg.elite_frac = 0.0;
    CHECK_THROWS_AS(cem_optimize(t, cfg), ContractError);
  }
}
