// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 10).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "invdes/agents.hpp"
#include "invdes/calibration.hpp"
#include "invdes/domain.hpp"
#include "invdes/harness.hpp"
#include "invdes/oracles/controls.hpp"
#include "invdes/oracles/filter.hpp"
#include "invdes/oracles/heatx.hpp"
#include "invdes/oracles/perturbation.hpp"
#include "invdes/oracles/pkpd.hpp"
#include "invdes/oracles/quantum.hpp"
#include "invdes/oracles/reactor.hpp"
#include "invdes/oracles/ssa.hpp"
#include "invdes/oracles/thinfilm.hpp"
#include "invdes/rlsf.hpp"
#include "invdes/taskgen.hpp"

using namespace invdes;
using namespace invdes::oracles;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

int failures = 0;

void report(int n, Verdict& v, double secs) {
  std::printf("criterion %2d: %s (%.2fs)%s\n", n, v.pass ? "PASS" : "FAIL", secs, v.detail.str().c_str());
  std::fflush(stdout);
  failures += v.pass ? 0 : 1;
}

void run(int n, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = Clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  report(n, v, seconds_since(t0));
}

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

std::string fmt(double v, const char* f = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

const Manifest& manifest() {
  static const Manifest m = build_manifest(domain_ids(), "acceptance");
  return m;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  std::printf("acceptance: %zu hardware thread(s)\n", static_cast<std::size_t>(jobs()));

  run(1, [](Verdict& v) {
    const auto t0 = Clock::now();
    const auto one = simulate_pkpd({1356.4, 12.0}, {0.8, 0.65, 5.0, 100.0, {}, {}});
    const auto two = simulate_pkpd({635.1, 12.0}, {1.5, 0.75, 10.0, 60.0, 0.3, 0.15});
    const double secs = seconds_since(t0);
    v.detail << " cmax1=" << fmt(one.cmax_mg_L) << " cmax2=" << fmt(two.cmax_mg_L) << " t1/2=" << fmt(one.half_life_hr);
    v.require(within_rel(one.cmax_mg_L, 13.42, 0.10), "one-compartment cmax");
    v.require(within_rel(two.cmax_mg_L, 6.47, 0.15), "two-compartment cmax");
    v.require(std::abs(one.half_life_hr - 13.86) < 1e-9, "half-life");
    v.require(secs < 5.0, "runtime");
  });

  run(2, [](Verdict& v) {
    const auto t0 = Clock::now();
    ThinFilmConfig glass;
    glass.substrate_index = {1.5, 0.0};
    glass.wavelengths_nm = {550.0};
    const double fresnel = simulate_thinfilm({}, glass).reflectance[0];
    v.require(std::abs(fresnel - 0.04) < 1e-9, "fresnel");

    ThinFilmConfig crown;
    crown.wavelengths_nm = {550.0};
    const double qw = simulate_thinfilm({{{"MgF2", 550.0 / (4.0 * 1.38)}}}, crown).reflectance[0];
    v.require(std::abs(qw - 0.0126) < 1e-3, "quarter-wave");

    const double h = 1.0 / std::sqrt(2.0);
    const auto bell = simulate_quantum({2, {{GateName::H, {0}, {}}, {GateName::CNOT, {0, 1}, {}}}}, {h, 0.0, 0.0, h});
    v.require(std::abs(bell.fidelity - 1.0) < 1e-9 && std::abs(bell.entanglement_entropy - 1.0) < 1e-9, "bell");

    const auto cstr = simulate_reactor({100.0, 2.0, 1.0, 350.0, 300.0}, {ReactionSystem::Single, 0.02, 0.0, 0.0, 0.0, 0.0});
    v.require(std::abs(cstr.conversion - 0.5) < 1e-9, "cstr");

    v.require(std::abs(effectiveness_ntu(1.0, 0.0, 1) - (1.0 - std::exp(-1.0))) < 1e-6, "eps-ntu");

    bool sse_ok = true;
    for (double kp : {0.5, 1.0, 3.0}) {
      const auto m = simulate_controls({kp, 0.0, 0.0, {}}, {{1.0}, {1.0, 1.0}});
      sse_ok = sse_ok && std::abs(m.steady_state_error - 1.0 / (1.0 + kp)) < 1e-3;
    }
    v.require(sse_ok, "p-control offset");
    const auto os = simulate_controls({4.0, 0.0, 0.0, {}}, {{1.0}, {1.0, 2.0, 0.0}});
    v.detail << " overshoot=" << fmt(os.overshoot_pct);
    v.require(std::abs(os.overshoot_pct - 16.3) <= 0.5, "overshoot");

    const auto bw = design_iir({FilterFamily::Butterworth, 4, FilterResponse::Lowpass, {0.3}, {}, {}});
    const double at_fc = 20.0 * std::log10(std::abs(frequency_response(bw, 0.3)));
    v.detail << " R=" << fmt(fresnel) << " Rqw=" << fmt(qw) << " H(fc)=" << fmt(at_fc) << "dB";
    v.require(std::abs(at_fc + 3.01) <= 0.05, "butterworth -3 dB");
    v.require(seconds_since(t0) < 10.0, "runtime");
  });

  run(3, [](Verdict& v) {
    SsaNetworkDesign bd;
    bd.species = {{"A", 0}};
    bd.reactions = {{{}, {{"A", 1}}, 10.0}, {{{"A", 1}}, {}, 1.0}};
    SsaConfig cfg;
    cfg.n_runs = 1000;
    cfg.t_end_s = 200.0;
    const auto t0 = Clock::now();
    const auto a = simulate_ssa(bd, cfg);
    const double secs = seconds_since(t0);
    const auto b = simulate_ssa(bd, cfg);
    v.detail << " mean=" << fmt(a.mean[0]) << " var=" << fmt(a.variance[0]) << " run=" << fmt(secs, "%.3f") << "s";
    v.require(within_rel(a.mean[0], 10.0, 0.05), "mean");
    v.require(within_rel(a.variance[0], 10.0, 0.10), "variance");
    v.require(a.mean == b.mean && a.variance == b.variance && a.total_events == b.total_events, "determinism");
    v.require(secs < 2.0, "runtime");
  });

  run(4, [](Verdict& v) {
    const auto t0 = Clock::now();
    const auto& m = grn_model();
    const auto n = m.genes.size();
    const auto w = m.dense_weights();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // Dense Gaussian elimination of (I - W) with row k pinned to the floor.
      std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - w[i * n + j];
      }
      std::fill(a[k].begin(), a[k].end(), 0.0);
      a[k][k] = 1.0;
      a[k][n] = m.knockout_log2_floor;
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
          if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        }
        std::swap(a[c], a[p]);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == c || a[r][c] == 0.0) continue;
          const double f = a[r][c] / a[c][c];
          for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
        }
      }
      const auto fp = knockout_fixed_point(m, k);
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(fp[i] - a[i][n] / a[i][i]));
    }
    v.detail << " genes=" << n << " max|diff|=" << fmt(worst);
    v.require(n == 51, "gene count");
    v.require(worst <= 1e-9, "fixed point");
    v.require(seconds_since(t0) < 1.0, "runtime");
  });

  run(5, [](Verdict& v) {
    const auto t0 = Clock::now();
    const auto& m = manifest();
    const auto arts = calibrate_tasks(m.tasks, m.generating_designs, {}, jobs());
    int solvable = 0, replay = 0;
    for (const auto& a : arts) {
      solvable += a.solvable ? 1 : 0;
      replay += a.replay_success.value_or(false) ? 1 : 0;
    }
    int monotone = 0;
    v.detail << " tasks=" << m.tasks.size() << " solvable=" << solvable << " replay=" << replay << " monotone:";
    for (const auto& p : level_profiles(m.tasks, arts)) {
      monotone += p.non_increasing() ? 1 : 0;
      v.detail << " " << p.domain << (p.non_increasing() ? "+" : "-");
    }
    v.detail << " (" << monotone << "/10)";
    v.require(m.tasks.size() == 400, "task count");
    v.require(solvable == 400, "solvability");
    v.require(replay == 400, "replay");
    v.require(monotone >= 8, "non-increasing random-search reward in >= 8 domains");
    v.require(seconds_since(t0) < 600.0, "runtime");
  });

  run(6, [](Verdict& v) {
    const auto& m = manifest();
    double random_sum = 0.0, hill_sum = 0.0;
    bool ordered = true;
    v.detail << " per seed (random/hill):";
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto rr = run_tasks(m.tasks, *make_random_agent(20, s), {1, 20}, jobs());
      const auto hr = run_tasks(m.tasks, *make_hillclimb_agent(0.1, s), {1, 200}, jobs());
      const double r = aggregate(rr, domain_ids()).overall_score;
      const double h = aggregate(hr, domain_ids()).overall_score;
      v.detail << " " << fmt(r, "%.1f") << "/" << fmt(h, "%.1f");
      ordered = ordered && h > r && r > 0.0;
      random_sum += r;
      hill_sum += h;
    }
    v.detail << " mean " << fmt(random_sum / 5, "%.1f") << "/" << fmt(hill_sum / 5, "%.1f");
    v.require(ordered, "hill > random > 0 on every seed");
    v.require(random_sum / 5 < 50.0, "random below 50%");
  });

  run(7, [](Verdict& v) {
    const auto a = group_advantages({1.0, 2.0, 3.0});
    v.require(std::abs(a[0] + 1.2247) < 1e-4 && std::abs(a[1]) < 1e-4 && std::abs(a[2] - 1.2247) < 1e-4, "advantages");
    v.require(std::abs(a[0] + a[1] + a[2]) < 1e-12, "zero mean");
    v.require(std::abs(clipped_objective_term(1.5, 1.0, 0.2) - 1.2) < 1e-12, "clip high");
    v.require(std::abs(clipped_objective_term(0.5, -1.0, 0.2) + 0.8) < 1e-12, "clip low");
    v.require(clipped_objective_term(1.0, 0.37, 0.2) == 0.37, "unit ratio");
    Goal g;
    g.domain = "reactor";
    g.difficulty = Level::L3;
    g.targets = {{"conversion", TargetKind::Exact, 0.5}, {"yield", TargetKind::Exact, 0.2},
                 {"selectivity", TargetKind::Exact, 0.4}};
    const double r = shaped_reward(g, {"reactor", json::object()},
                                   {"reactor", {{"conversion", 0.5}, {"yield", 0.2}, {"selectivity", 0.4}}}, {});
    v.detail << " A=" << fmt(a[0]) << "," << fmt(a[1]) << "," << fmt(a[2]) << " shaped=" << fmt(r);
    v.require(std::abs(r - 18.0) < 1e-9, "shaped reward");
  });

  run(8, [](Verdict& v) {
    const auto t0 = Clock::now();
    const auto& m = manifest();
    std::size_t max_calls = 0;
    for (const std::string dom : {"reactor", "pkpd"}) {
      std::vector<double> rates;
      for (std::uint64_t s = 0; s < 3; ++s) {
        int ok = 0, n = 0;
        for (const auto& t : m.tasks) {
          if (t.goal.domain != dom || t.goal.difficulty != Level::L1) continue;
          CemConfig cfg;
          cfg.seed = s;
          const auto r = cem_optimize(t, cfg);
          max_calls = std::max(max_calls, r.oracle_calls);
          ok += r.success ? 1 : 0;
          ++n;
        }
        rates.push_back(100.0 * ok / n);
      }
      const double med = median(rates);
      v.detail << " " << dom << "=" << fmt(med, "%.0f") << "%";
      v.require(med >= 80.0, dom + " success");
    }
    v.detail << " max_calls=" << max_calls;
    v.require(max_calls <= 500, "oracle budget");
    v.require(seconds_since(t0) < 120.0, "runtime");
  });

  run(9, [](Verdict& v) {
    const std::map<std::string, std::pair<int, int>> modes{
        {"denovo-1", {3, 1}}, {"denovo-5", {3, 5}}, {"denovo-20", {1, 20}}, {"opt-1", {3, 1}}, {"opt-20", {1, 20}}};
    for (const auto& [mode, kt] : modes) {
      const auto c = mode_config(mode);
      v.require(c.attempts_K == kt.first && c.max_turns == kt.second, "mode " + mode);
    }

    const auto& m = manifest();
    const auto replay = make_replay_agent(m.generating_designs);
    std::size_t calls = 0, attempts = 0;
    bool all_ok = true;
    for (std::size_t i = 0; i < m.tasks.size(); i += 7) {
      const auto r = run_task(m.tasks[i], *replay, mode_config("denovo-5"));
      calls += r.oracle_calls;
      attempts += r.attempts.size();
      all_ok = all_ok && r.task_success;
    }
    v.require(all_ok && calls == attempts, "replay: one oracle call per attempt");

    const auto junk = make_constant_agent("no design today");
    const auto before = oracle_call_count();
    const auto r = run_task(m.tasks.front(), *junk, mode_config("denovo-20"));
    v.require(r.attempts.size() == 1 && r.attempts[0].turns.size() == 20 && r.oracle_calls == 0 &&
                  oracle_call_count() == before,
              "invalid output consumes budget without oracle calls");

    Goal g;
    g.domain = "reactor";
    g.difficulty = Level::L3;
    g.targets = {{"conversion", TargetKind::Exact, 0.8}, {"yield", TargetKind::MinBound, 0.4},
                 {"productivity", TargetKind::MaxBound, 1.5}};
    const Outcome o{"reactor", {{"conversion", 0.7123456}, {"yield", 0.35}, {"productivity", 1.9}}};
    const auto text = render_feedback(build_feedback(g, o, false, EvalConfig{}), 3);
    v.require(text == slurp(std::filesystem::path(INVDES_GOLDEN_DIR) / "feedback_reactor_l3.txt"), "golden feedback");
    v.detail << " replay_calls=" << calls << "/" << attempts;
  });

  run(10, [](Verdict& v) {
    const auto& m = manifest();
    std::map<std::string, std::vector<double>> ms;
    for (const auto& t : m.tasks) {
      const auto& d = get_domain(t.goal.domain);
      const auto& design = m.generating_designs.at(t.task_id);
      const auto t0 = Clock::now();
      d.simulate(t.goal, design);
      ms[t.goal.domain].push_back(1e3 * seconds_since(t0));
    }
    for (const auto& id : domain_ids()) {
      if (id == "ssa") continue;
      const double med = median(ms[id]);
      const double budget = id == "pkpd" ? 250.0 : 10.0;
      v.detail << " " << id << "=" << fmt(med, "%.3g") << "ms";
      v.require(med < budget, id + " median latency");
    }
    SsaNetworkDesign bd;
    bd.species = {{"A", 0}};
    bd.reactions = {{{}, {{"A", 1}}, 10.0}, {{{"A", 1}}, {}, 1.0}};
    SsaConfig cfg;
    cfg.n_runs = 1000;
    std::vector<double> ssa;
    for (int i = 0; i < 3; ++i) {
      cfg.seed = static_cast<std::uint64_t>(i);
      const auto t0 = Clock::now();
      simulate_ssa(bd, cfg);
      ssa.push_back(seconds_since(t0));
    }
    v.detail << " ssa(1000 runs)=" << fmt(median(ssa), "%.3f") << "s ssa(manifest)=" << fmt(median(ms["ssa"]), "%.3g")
             << "ms";
    v.require(median(ssa) < 1.5, "ssa latency");
  });

  std::printf("acceptance: %d of 10 criteria failed\n", failures);
  return std::min(failures, 10);
}
