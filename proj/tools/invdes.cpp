// invdes: generate, calibrate, evaluate and report.
//
// Exit codes: 0 ok, 1 gate failure (unsolvable tasks), 2 bad input,
// 3 refused overwrite, 4 agent handshake failure.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "invdes/agents.hpp"
#include "invdes/calibration.hpp"
#include "invdes/harness.hpp"
#include "invdes/rlsf.hpp"
#include "invdes/taskgen.hpp"

namespace fs = std::filesystem;
using namespace invdes;

namespace {

constexpr int kExitGate = 1;
constexpr int kExitInput = 2;
constexpr int kExitImmutable = 3;
constexpr int kExitHandshake = 4;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

struct Failure {
  int code;
  std::string message;
};

std::string default_out() {
  const char* env = std::getenv("INVDES_OUT");
  return env && *env ? env : "invdes-out";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> parse_domains(const std::string& spec) {
  if (spec.empty() || spec == "all") return domain_ids();
  auto list = split_list(spec);
  for (const auto& d : list) {
    if (!has_domain(d)) throw Failure{kExitInput, "unknown domain '" + d + "'"};
  }
  return list;
}

Manifest open_manifest(const std::string& path) {
  if (path.empty()) throw Failure{kExitInput, "--manifest is required"};
  if (!fs::exists(path)) throw Failure{kExitInput, "manifest not found: " + path};
  try {
    return load_manifest(path);
  } catch (const std::exception& e) {
    throw Failure{kExitInput, std::string("cannot read manifest: ") + e.what()};
  }
}

std::vector<TaskRecord> select_tasks(const Manifest& m, const std::vector<std::string>& domains,
                                     std::optional<TaskKind> kind, const std::set<Level>& levels) {
  const std::set<std::string> want(domains.begin(), domains.end());
  std::vector<TaskRecord> out;
  for (const auto& t : m.tasks) {
    if (!want.count(t.goal.domain)) continue;
    if (kind && t.goal.task_kind != *kind) continue;
    if (!levels.empty() && !levels.count(t.goal.difficulty)) continue;
    out.push_back(t);
  }
  if (out.empty()) throw Failure{kExitInput, "no tasks match the selection"};
  return out;
}

std::set<Level> parse_levels(const std::string& spec) {
  std::set<Level> out;
  for (const auto& l : split_list(spec)) {
    try {
      out.insert(level_from_string(l));
    } catch (const std::exception&) {
      throw Failure{kExitInput, "unknown level '" + l + "'"};
    }
  }
  return out;
}

std::string timestamp() {
  const auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string slug(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
  }
  return s.substr(0, 48);
}

fs::path fresh_dir(const fs::path& base, const std::string& stem) {
  fs::path p = base / stem;
  for (int i = 2; fs::exists(p); ++i) p = base / (stem + "-" + std::to_string(i));
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Failure{kExitInput, "cannot write " + p.string()};
  f << text;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string domains = "all";
  std::string version = "v1";
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  const auto domains = parse_domains(a.domains);
  const fs::path root = a.out.empty() ? default_out() : a.out;
  try {
    const auto m = freeze_manifest(domains, a.version, root);
    const auto paths = manifest_paths(root, a.version);
    std::cout << "wrote " << m.tasks.size() << " tasks to " << paths.manifest.string() << "\n"
              << "hidden designs in " << paths.hidden.string() << "\n";
  } catch (const ImmutableError& e) {
    throw Failure{kExitImmutable, e.what()};
  } catch (const ContractError& e) {
    throw Failure{kExitInput, e.what()};
  }
  return 0;
}

// ---- calibrate -------------------------------------------------------------

struct CalibrateArgs {
  std::string manifest;
  std::string domains = "all";
  int jobs = 1;
  std::uint64_t seed = 0;
  CalibrationConfig config;
};

int cmd_calibrate(CalibrateArgs a) {
  const auto m = open_manifest(a.manifest);
  const auto hidden = load_hidden_designs(a.manifest);
  const auto tasks = select_tasks(m, parse_domains(a.domains), std::nullopt, {});
  a.config.seed = a.seed;
  const auto arts = calibrate_tasks(tasks, hidden, a.config, a.jobs);
  const auto dir = calibration_dir(a.manifest, a.seed);
  int written = 0, solvable = 0, replayed = 0;
  std::map<std::string, int> buckets;
  for (const auto& art : arts) {
    try {
      written += write_calibration(dir, art) ? 1 : 0;
    } catch (const ImmutableError& e) {
      throw Failure{kExitImmutable, e.what()};
    }
    solvable += art.solvable ? 1 : 0;
    replayed += art.replay_success.value_or(false) ? 1 : 0;
    ++buckets[art.difficulty_bucket];
  }
  std::cout << "calibrated " << arts.size() << " tasks into " << dir.string() << " (" << written << " new)\n"
            << "solvable " << solvable << "/" << arts.size() << ", replay " << replayed << "/" << arts.size()
            << "\nbuckets:";
  for (const auto& [b, n] : buckets) std::cout << " " << b << "=" << n;
  std::cout << "\nrandom-search mean best reward by level:\n";
  int monotone = 0;
  const auto profiles = level_profiles(tasks, arts);
  for (const auto& p : profiles) {
    std::printf("  %-14s %6.2f %6.2f %6.2f %6.2f  %s\n", p.domain.c_str(), p.mean_best_reward[0],
                p.mean_best_reward[1], p.mean_best_reward[2], p.mean_best_reward[3],
                p.non_increasing() ? "non-increasing" : "not monotone");
    monotone += p.non_increasing() ? 1 : 0;
  }
  std::cout << "non-increasing in " << monotone << "/" << profiles.size() << " domains\n";
  return solvable == static_cast<int>(arts.size()) ? 0 : kExitGate;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  std::string agent = "random:seed=1";
  std::string mode = "denovo-1";
  std::string domains = "all";
  std::string levels;
  std::string out;
  int jobs = 1;
  int attempts = 0;  // 0: mode default
  int turns = 0;
  int turn_timeout_ms = 60'000;
  bool transcript = false;
};

int cmd_eval(const EvalArgs& a) {
  EvalConfig cfg;
  try {
    cfg = mode_config(a.mode);
  } catch (const ContractError& e) {
    throw Failure{kExitInput, e.what()};
  }
  if (a.attempts > 0) cfg.attempts_K = a.attempts;
  if (a.turns > 0) cfg.max_turns = a.turns;
  cfg.keep_transcript = a.transcript;

  const auto m = open_manifest(a.manifest);
  const auto tasks = select_tasks(m, parse_domains(a.domains), mode_kind(a.mode), parse_levels(a.levels));

  std::unique_ptr<Agent> agent;
  try {
    agent = make_agent(a.agent, load_hidden_designs(a.manifest), a.turn_timeout_ms);
  } catch (const ContractError& e) {
    throw Failure{kExitInput, e.what()};
  }
  try {
    agent_handshake(*agent);
  } catch (const AgentError& e) {
    throw Failure{kExitHandshake, e.what()};
  }

  const fs::path base = fs::path(a.out.empty() ? default_out() : a.out) / "runs";
  const auto dir = fresh_dir(base, timestamp() + "-" + a.mode + "-" + slug(agent->name()));
  std::ofstream partial(dir / "results.partial.jsonl");
  std::size_t done = 0;
  std::signal(SIGINT, on_sigint);
  const auto results = run_tasks(tasks, *agent, cfg, a.jobs, &g_stop, [&](const EvalResult& r) {
    partial << to_json(r, a.transcript).dump() << "\n" << std::flush;
    std::cerr << "\r" << ++done << "/" << tasks.size() << " tasks" << std::flush;
  });
  std::signal(SIGINT, SIG_DFL);
  std::cerr << "\n";
  partial.close();

  {
    std::ofstream f(dir / "results.jsonl", std::ios::binary);
    for (const auto& r : results) f << to_json(r, a.transcript).dump() << "\n";
  }
  fs::remove(dir / "results.partial.jsonl");

  std::vector<std::string> doms;
  for (const auto& d : domain_ids()) {
    for (const auto& t : tasks) {
      if (t.goal.domain == d) {
        doms.push_back(d);
        break;
      }
    }
  }
  const auto rep = aggregate(results, doms);
  const bool truncated = results.size() < tasks.size();
  json rj = to_json(rep);
  rj["mode"] = a.mode;
  rj["agent"] = agent->name();
  rj["manifest"] = a.manifest;
  rj["attempts_K"] = cfg.attempts_K;
  rj["max_turns"] = cfg.max_turns;
  rj["n_tasks_planned"] = tasks.size();
  rj["n_tasks_completed"] = results.size();
  rj["truncated"] = truncated;
  write_text(dir / "report.json", rj.dump(2) + "\n");
  std::string table = render_table(rep);
  if (truncated) {
    table += "TRUNCATED: " + std::to_string(results.size()) + " of " + std::to_string(tasks.size()) +
             " tasks completed\n";
    write_text(dir / "TRUNCATED", std::to_string(results.size()) + "/" + std::to_string(tasks.size()) + "\n");
  }
  write_text(dir / "report.txt", table);
  std::cout << table << "results in " << dir.string() << "\n";
  return truncated ? 130 : 0;
}

// ---- report ----------------------------------------------------------------

std::vector<EvalResult> read_results(const std::string& arg) {
  fs::path p = arg;
  if (fs::is_directory(p)) p /= "results.jsonl";
  std::ifstream in(p);
  if (!in) throw Failure{kExitInput, "cannot read results: " + p.string()};
  std::vector<EvalResult> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      out.push_back(eval_result_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Failure{kExitInput, "bad result line in " + p.string() + ": " + e.what()};
    }
  }
  return out;
}

int cmd_report(const std::vector<std::string>& inputs, bool as_json) {
  if (inputs.empty()) throw Failure{kExitInput, "report needs at least one result set"};
  std::vector<std::vector<EvalResult>> runs;
  std::vector<std::string> names;
  for (const auto& in : inputs) {
    runs.push_back(read_results(in));
    fs::path p = in;
    if (p.filename() == "results.jsonl" || p.filename().empty()) p = p.parent_path();
    std::string name = p.filename().string();
    // Drop the run timestamp; the mode and agent identify the column.
    if (const auto dash = name.find("Z-"); dash != std::string::npos && dash == 15) name = name.substr(dash + 2);
    names.push_back(name);
  }
  const auto core = shared_domains(runs);
  if (as_json) {
    json j = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      j.push_back({{"name", names[i]},
                   {"report", to_json(aggregate(runs[i], domain_ids()))},
                   {"shared_core", to_json(aggregate(runs[i], core))}});
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (runs.size() == 1) {
    std::cout << render_table(aggregate(runs[0], core));
  } else {
    std::cout << render_comparison(names, runs);
  }
  return 0;
}

// ---- cem -------------------------------------------------------------------

struct CemArgs {
  std::string manifest;
  std::string domains = "all";
  std::string levels;
  std::string kind = "all";
  CemConfig config;
};

int cmd_cem(const CemArgs& a) {
  const auto m = open_manifest(a.manifest);
  std::optional<TaskKind> kind;
  if (a.kind != "all") {
    try {
      kind = task_kind_from_string(a.kind);
    } catch (const std::exception&) {
      throw Failure{kExitInput, "unknown task kind '" + a.kind + "'"};
    }
  }
  const auto tasks = select_tasks(m, parse_domains(a.domains), kind, parse_levels(a.levels));
  int ok = 0;
  for (const auto& t : tasks) {
    const auto r = cem_optimize(t, a.config);
    ok += r.success ? 1 : 0;
    std::printf("%-28s %s reward %6.2f calls %4zu iterations %d\n", t.task_id.c_str(),
                r.success ? "solved  " : "unsolved", r.best_reward, r.oracle_calls, r.iterations_run);
  }
  std::printf("solved %d/%zu\n", ok, tasks.size());
  return 0;
}

// ---- rollout ---------------------------------------------------------------

struct RolloutArgs {
  std::string manifest;
  std::string agent = "random:seed=1";
  std::string domains = "all";
  std::string levels;
  std::string out;
  int K = 4;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::optional<double> sft_tau;
  std::string sft_out;
};

int cmd_rollout(const RolloutArgs& a) {
  const auto m = open_manifest(a.manifest);
  const auto tasks = select_tasks(m, parse_domains(a.domains), std::nullopt, parse_levels(a.levels));
  std::unique_ptr<Agent> agent;
  try {
    agent = make_agent(a.agent, load_hidden_designs(a.manifest));
    agent_handshake(*agent);
  } catch (const ContractError& e) {
    throw Failure{kExitInput, e.what()};
  } catch (const AgentError& e) {
    throw Failure{kExitHandshake, e.what()};
  }
  // Sample k is the first turn of attempt k.
  Sampler sampler = [&](const TaskRecord& task, std::uint64_t, int, int k) {
    auto session = agent->open(task, k);
    TurnRequest req{task.task_id, k, 1, render_goal(task), get_domain(task.goal.domain).shape().to_schema(), {}};
    return session->respond(req).raw_text;
  };
  RewardConfig rc;
  const auto groups = rollout_batch(tasks, sampler, a.K, a.seed, rc, a.jobs);
  const fs::path out = a.out.empty() ? fs::path(default_out()) / "rollouts.jsonl" : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  {
    std::ofstream f(out, std::ios::binary);
    for (const auto& g : groups) f << to_json(g).dump() << "\n";
  }
  std::cout << "wrote " << groups.size() << " groups of " << a.K << " to " << out.string() << "\n";
  if (a.sft_tau) {
    if (a.sft_out.empty()) throw Failure{kExitInput, "--sft-out is required with --sft-tau"};
    std::ofstream f(a.sft_out, std::ios::binary);
    const auto n = export_sft(groups, *a.sft_tau, f);
    std::cout << "exported " << n << " samples above tau to " << a.sft_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse-design benchmark: task generation, calibration, evaluation and reporting"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "freeze a manifest version");
  g->add_option("--domains", gen.domains, "comma-separated domain ids or 'all'");
  g->add_option("--version", gen.version, "manifest version label");
  g->add_option("--out", gen.out, "manifest root (default $INVDES_OUT or ./invdes-out)");

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "write calibration artifacts beside a manifest");
  c->add_option("--manifest", cal.manifest, "manifest.json")->required();
  c->add_option("--domains", cal.domains, "comma-separated domain ids or 'all'");
  c->add_option("--jobs", cal.jobs, "worker threads")->check(CLI::PositiveNumber);
  c->add_option("--seed", cal.seed, "probe seed");
  c->add_option("--budget", cal.config.budget, "random-search samples per trial")->check(CLI::PositiveNumber);
  c->add_option("--trials", cal.config.n_trials, "random-search trials")->check(CLI::PositiveNumber);
  c->add_option("--sweep-points", cal.config.sweep_points, "sweep designs")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate an agent on a manifest");
  e->add_option("--manifest", ev.manifest, "manifest.json")->required();
  e->add_option("--agent", ev.agent, "random:seed=S,budget=B | hillclimb:seed=S,step=X | replay | stdio:<cmd> | http:url=U");
  e->add_option("--mode", ev.mode, "evaluation mode")->check(CLI::IsMember(kEvalModes));
  e->add_option("--domains", ev.domains, "comma-separated domain ids or 'all'");
  e->add_option("--levels", ev.levels, "comma-separated levels, e.g. L1,L2");
  e->add_option("--out", ev.out, "output root (default $INVDES_OUT or ./invdes-out)");
  e->add_option("--jobs", ev.jobs, "worker threads")->check(CLI::PositiveNumber);
  e->add_option("--attempts", ev.attempts, "override attempts per task")->check(CLI::PositiveNumber);
  e->add_option("--turns", ev.turns, "override turns per attempt")->check(CLI::PositiveNumber);
  e->add_option("--turn-timeout-ms", ev.turn_timeout_ms, "external agent reply timeout")->check(CLI::PositiveNumber);
  e->add_flag("--transcript", ev.transcript, "store full transcripts in results");

  std::vector<std::string> report_inputs;
  bool report_json = false;
  auto* r = app.add_subcommand("report", "summarize one or more result sets");
  r->add_option("results", report_inputs, "run directories or results.jsonl files")->required();
  r->add_flag("--json", report_json, "print JSON instead of a table");

  CemArgs cem;
  auto* ce = app.add_subcommand("cem", "run the cross-entropy reference optimizer on tasks");
  ce->add_option("--manifest", cem.manifest, "manifest.json")->required();
  ce->add_option("--domains", cem.domains, "comma-separated domain ids or 'all'");
  ce->add_option("--levels", cem.levels, "comma-separated levels");
  ce->add_option("--kind", cem.kind, "de_novo | optimization | all");
  ce->add_option("--seed", cem.config.seed, "sampling seed");
  ce->add_option("--iterations", cem.config.iterations)->check(CLI::PositiveNumber);
  ce->add_option("--population", cem.config.population)->check(CLI::PositiveNumber);
  ce->add_option("--elite-frac", cem.config.elite_frac)->check(CLI::Range(0.0, 1.0));

  RolloutArgs ro;
  auto* rl = app.add_subcommand("rollout", "sample K designs per task and score them with the shaped reward");
  rl->add_option("--manifest", ro.manifest, "manifest.json")->required();
  rl->add_option("--agent", ro.agent, "agent spec, as for eval");
  rl->add_option("--domains", ro.domains, "comma-separated domain ids or 'all'");
  rl->add_option("--levels", ro.levels, "comma-separated levels");
  rl->add_option("--group", ro.K, "samples per task")->check(CLI::Range(2, 1 << 20));
  rl->add_option("--jobs", ro.jobs, "worker threads")->check(CLI::PositiveNumber);
  rl->add_option("--seed", ro.seed, "rollout seed");
  rl->add_option("--out", ro.out, "group samples (JSON lines)");
  rl->add_option("--sft-tau", ro.sft_tau, "export samples with reward above this threshold");
  rl->add_option("--sft-out", ro.sft_out, "SFT export file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*c) return cmd_calibrate(cal);
    if (*e) return cmd_eval(ev);
    if (*r) return cmd_report(report_inputs, report_json);
    if (*ce) return cmd_cem(cem);
    if (*rl) return cmd_rollout(ro);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInput;
  }
  return 0;
}
