#include "invdes/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "invdes/domain.hpp"
#include "invdes/rng.hpp"

namespace invdes {

namespace {

constexpr int kStartRetries = 60;
// Bound jitter stays below the bound slack so the generator keeps passing.
constexpr double kMaxBoundJitter = 0.09;
constexpr int kTargetDigits = 6;
constexpr int kManifestSchema = 1;

double round_sig(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return std::stod(os.str());
}

TargetSpec make_target(const MetricInfo& m, double v, double tol, CounterRng& rng) {
  const double u = rng.uniform(-0.5 * tol, 0.5 * tol);
  const double j = std::min(std::abs(u), kMaxBoundJitter);
  if (m.preferred == TargetKind::Exact) {
    if (std::abs(v) < m.floor) return {m.name, TargetKind::MaxBound, m.floor};
    return {m.name, TargetKind::Exact, round_sig(std::min(v * (1.0 + u), m.ceiling), kTargetDigits)};
  }
  if (m.preferred == TargetKind::MinBound && v > 0.0) {
    return {m.name, TargetKind::MinBound, round_sig(std::min(v * (1.0 + j), m.ceiling), kTargetDigits)};
  }
  if (m.preferred == TargetKind::MaxBound && v > 0.0) {
    return {m.name, TargetKind::MaxBound, round_sig(v * (1.0 - j), kTargetDigits)};
  }
  return {m.name, TargetKind::Exact, round_sig(v * (1.0 + u), kTargetDigits)};
}

std::vector<MetricInfo> choose_metrics(std::vector<MetricInfo> pool, std::size_t n, CounterRng& rng) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n && i < idx.size(); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.integer(0, static_cast<long long>(idx.size() - i) - 1));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(std::min(n, idx.size()));
  std::sort(idx.begin(), idx.end());
  std::vector<MetricInfo> out;
  for (auto i : idx) out.push_back(pool[i]);
  return out;
}

bool try_simulate(const Domain& d, const Goal& g, const Design& design, Outcome& out) {
  try {
    out = d.simulate(g, design);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool all_finite(const Outcome& o) {
  return std::all_of(o.metrics.begin(), o.metrics.end(), [](const auto& kv) { return std::isfinite(kv.second); });
}

std::string kind_slug(TaskKind k) { return k == TaskKind::DeNovo ? "denovo" : "opt"; }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << text;
  }
  std::filesystem::rename(tmp, p);
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  return json::parse(f);
}

std::size_t canonical_index(const std::string& domain) {
  const auto& ids = domain_ids();
  return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), domain) - ids.begin());
}

}  // namespace

GeneratedTask forward_generate_goal(const std::string& domain, Level level, TaskKind kind,
                                    std::uint64_t seed) {
  const Domain& d = get_domain(domain);
  if (!(seed < kTrainingSeeds.hi)) throw ContractError("seed outside every seed range");
  const double tol = level_tolerance(level);
  for (int attempt = 0; attempt < kMaxGenerationRetries; ++attempt) {
    CounterRng rng{hash_string(domain), static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(kind), seed,
                   static_cast<std::uint64_t>(attempt)};
    Goal goal;
    goal.domain = domain;
    goal.difficulty = level;
    goal.seed = seed;
    goal.task_kind = kind;
    goal.context = d.make_context(level, rng);
    goal.constraints = d.make_constraints(level, goal.context);

    const Design gen = d.decode(goal, sample_point(d.coordinates(goal), rng));
    if (!design_errors(d, goal, gen.params).empty()) continue;
    if (!d.bind_generator(goal.context, level, gen, rng)) continue;
    Outcome out;
    if (!try_simulate(d, goal, gen, out) || !d.usable_outcome(goal, out)) continue;

    const auto pool = selectable_metrics(d, goal.context);
    for (const auto& m : choose_metrics(pool, level_target_count(level, pool.size()), rng)) {
      goal.targets.push_back(make_target(m, out.metrics.at(m.name), tol, rng));
    }
    if (goal.targets.empty() || !targets_met(goal, out, tol)) continue;

    GeneratedTask task;
    task.record.goal = goal;
    task.generating_design = gen;
    task.generating_outcome = out;
    if (kind == TaskKind::Optimization) {
      bool found = false;
      for (int s = 0; s < kStartRetries && !found; ++s) {
        const Design start = d.decode(goal, sample_point(d.coordinates(goal), rng));
        if (!design_errors(d, goal, start.params).empty() || designs_equal(start, gen)) continue;
        Outcome so;
        if (!try_simulate(d, goal, start, so) || !all_finite(so)) continue;
        if (targets_met(goal, so, tol)) continue;
        task.record.starting_design = start;
        task.record.starting_outcome = so;
        found = true;
      }
      if (!found) continue;
    }
    if (!success_predicate(goal, out, task.record.starting_design, gen)) continue;
    return task;
  }
  throw std::runtime_error("could not generate a task for " + domain + " " + to_string(level) + " seed " +
                           std::to_string(seed));
}

Goal jitter_goal(const Goal& goal, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= kMaxJitterFraction)) {
    throw ContractError("jitter fraction must lie in [0, 0.25]");
  }
  Goal out = goal;
  for (auto& t : out.targets) {
    if (t.kind != TargetKind::Exact) continue;
    CounterRng rng{seed, hash_string(t.metric_name)};
    t.value *= 1.0 + rng.uniform(-fraction, fraction);
  }
  return out;
}

std::string task_id(const std::string& domain, TaskKind kind, Level level, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", index);
  return domain + "-" + kind_slug(kind) + "-" + to_string(level) + "-" + buf;
}

std::uint64_t benchmark_seed(std::size_t domain_index, TaskKind kind, Level level, int index) {
  return domain_index * 10'000 + (kind == TaskKind::DeNovo ? 0 : 1'000) +
         static_cast<std::uint64_t>(level) * 100 + static_cast<std::uint64_t>(index);
}

Manifest build_manifest(const std::vector<std::string>& domains, const std::string& version) {
  if (version.empty()) throw ContractError("manifest version is empty");
  Manifest m;
  m.version = version;
  std::set<std::string> seen;
  for (const auto& dom : domains) {
    if (!has_domain(dom)) throw ContractError("unknown domain '" + dom + "'");
    if (seen.insert(dom).second) m.domains.push_back(dom);
  }
  for (const auto& dom : m.domains) {
    for (TaskKind kind : {TaskKind::DeNovo, TaskKind::Optimization}) {
      int index = 0;
      for (Level level : {Level::L1, Level::L2, Level::L3, Level::L4}) {
        for (int i = 0; i < kTasksPerLevel; ++i, ++index) {
          ManifestEntry e{task_id(dom, kind, level, index), dom, level, kind,
                          benchmark_seed(canonical_index(dom), kind, level, i)};
          auto gen = forward_generate_goal(dom, level, kind, e.seed);
          gen.record.task_id = e.task_id;
          m.generating_designs[e.task_id] = gen.generating_design;
          m.tasks.push_back(std::move(gen.record));
          m.entries.push_back(std::move(e));
        }
      }
    }
  }
  return m;
}

json manifest_to_json(const Manifest& m) {
  json index = json::array();
  json tasks = json::array();
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const auto& e = m.entries[i];
    index.push_back({{"task_id", e.task_id},
                     {"domain", e.domain},
                     {"difficulty", to_string(e.level)},
                     {"task_kind", to_string(e.kind)},
                     {"seed", e.seed}});
    tasks.push_back(to_json(m.tasks[i]));
  }
  return {{"schema_version", kManifestSchema},
          {"version", m.version},
          {"domains", m.domains},
          {"seed_ranges",
           {{"benchmark", {kBenchmarkSeeds.lo, kBenchmarkSeeds.hi}},
            {"holdout", {kHoldoutSeeds.lo, kHoldoutSeeds.hi}},
            {"training", {kTrainingSeeds.lo, kTrainingSeeds.hi}}}},
          {"index", index},
          {"tasks", tasks}};
}

json hidden_to_json(const Manifest& m) {
  json designs = json::object();
  for (const auto& [id, d] : m.generating_designs) designs[id] = to_json(d);
  return {{"schema_version", kManifestSchema}, {"version", m.version}, {"generating_designs", designs}};
}

Manifest manifest_from_json(const json& j) {
  if (j.value("schema_version", 0) != kManifestSchema) throw ContractError("unsupported manifest schema");
  Manifest m;
  m.version = j.at("version").get<std::string>();
  m.domains = j.at("domains").get<std::vector<std::string>>();
  for (const auto& t : j.at("tasks")) {
    auto rec = task_from_json(t);
    ManifestEntry e{rec.task_id, rec.goal.domain, rec.goal.difficulty, rec.goal.task_kind, rec.goal.seed};
    m.entries.push_back(std::move(e));
    m.tasks.push_back(std::move(rec));
  }
  return m;
}

std::map<std::string, Design> hidden_from_json(const json& j) {
  std::map<std::string, Design> out;
  for (const auto& [id, d] : j.at("generating_designs").items()) out[id] = design_from_json(d);
  return out;
}

ManifestPaths manifest_paths(const std::filesystem::path& root, const std::string& version) {
  return {root / version / "manifest.json", root / (version + ".hidden") / "generating_designs.json"};
}

Manifest freeze_manifest(const std::vector<std::string>& domains, const std::string& version,
                         const std::filesystem::path& root) {
  const auto paths = manifest_paths(root, version);
  if (std::filesystem::exists(paths.manifest.parent_path()) || std::filesystem::exists(paths.hidden.parent_path())) {
    throw ImmutableError("manifest version '" + version + "' already exists under " + root.string());
  }
  auto m = build_manifest(domains, version);
  write_file(paths.hidden, hidden_to_json(m).dump(2) + "\n");
  write_file(paths.manifest, manifest_to_json(m).dump(2) + "\n");
  return m;
}

Manifest load_manifest(const std::filesystem::path& manifest_file) {
  auto m = manifest_from_json(read_json_file(manifest_file));
  m.generating_designs = load_hidden_designs(manifest_file);
  return m;
}

std::map<std::string, Design> load_hidden_designs(const std::filesystem::path& manifest_file) {
  const auto dir = std::filesystem::absolute(manifest_file).parent_path();
  const auto sidecar = dir.parent_path() / (dir.filename().string() + ".hidden") / "generating_designs.json";
  if (!std::filesystem::exists(sidecar)) return {};
  return hidden_from_json(read_json_file(sidecar));
}

}  // namespace invdes
