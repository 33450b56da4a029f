#include "invdes/oracles/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "invdes/model.hpp"
#include "invdes/rng.hpp"

namespace invdes::oracles {

namespace {

struct CompiledReaction {
  // (species index, stoichiometry) pairs.
  std::vector<std::pair<std::size_t, int>> reactants;
  std::vector<std::pair<std::size_t, int>> delta;
  double k;

  double propensity(const std::vector<long long>& x) const {
    double a = k;
    for (const auto& [i, nu] : reactants) {
      const auto n = static_cast<double>(x[i]);
      if (nu == 1) a *= n;
      else a *= n * (n - 1.0) / 2.0;  // nu == 2
    }
    return a;
  }
};

std::vector<CompiledReaction> compile(const SsaNetworkDesign& d) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.species.size(); ++i) index[d.species[i].name] = i;
  std::vector<CompiledReaction> out;
  for (const auto& r : d.reactions) {
    CompiledReaction c;
    c.k = r.rate_constant;
    std::map<std::size_t, int> net;
    for (const auto& [name, nu] : r.reactants) {
      c.reactants.emplace_back(index.at(name), nu);
      net[index.at(name)] -= nu;
    }
    for (const auto& [name, nu] : r.products) net[index.at(name)] += nu;
    for (const auto& [i, v] : net) {
      if (v != 0) c.delta.emplace_back(i, v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Height of the first local maximum of the autocorrelation beyond lag 0,
// clipped to [0, 1]; 0 for a constant signal.
double first_acf_peak(const std::vector<double>& y) {
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : y) c0 += (v - mean) * (v - mean);
  if (c0 <= 0.0) return 0.0;
  const std::size_t max_lag = n / 2;
  std::vector<double> acf(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (y[i] - mean) * (y[i + lag] - mean);
    acf[lag] = s / c0;
  }
  for (std::size_t lag = 2; lag < max_lag; ++lag) {
    if (acf[lag] > acf[lag - 1] && acf[lag] >= acf[lag + 1]) return std::clamp(acf[lag], 0.0, 1.0);
  }
  return 0.0;
}

}  // namespace

std::vector<std::string> network_errors(const SsaNetworkDesign& d) {
  std::vector<std::string> errs;
  if (d.species.empty()) errs.push_back("at least one species is required");
  if (d.species.size() > kMaxSpecies) errs.push_back("too many species (max 8)");
  if (d.reactions.size() > kMaxReactions) errs.push_back("too many reactions (max 16)");
  std::set<std::string> names;
  for (const auto& s : d.species) {
    if (s.name.empty()) errs.push_back("species name is empty");
    if (!names.insert(s.name).second) errs.push_back("duplicate species '" + s.name + "'");
    if (s.initial_count < 0) errs.push_back("species '" + s.name + "' has a negative count");
  }
  for (std::size_t r = 0; r < d.reactions.size(); ++r) {
    const auto& rx = d.reactions[r];
    const std::string tag = "reaction " + std::to_string(r);
    if (!(rx.rate_constant > 0.0) || !std::isfinite(rx.rate_constant)) {
      errs.push_back(tag + ": rate_constant must be positive");
    }
    int order = 0;
    for (const auto* side : {&rx.reactants, &rx.products}) {
      for (const auto& [name, nu] : *side) {
        if (!names.count(name)) errs.push_back(tag + ": unknown species '" + name + "'");
        if (nu < 1) errs.push_back(tag + ": stoichiometry must be a positive integer");
      }
    }
    for (const auto& [name, nu] : rx.reactants) order += nu;
    if (order > kMaxReactionOrder) errs.push_back(tag + ": total reactant order exceeds 2");
  }
  return errs;
}

SsaOutcome simulate_ssa(const SsaNetworkDesign& design, const SsaConfig& cfg) {
  if (auto errs = network_errors(design); !errs.empty()) throw ValidationError(errs.front());
  if (cfg.n_runs < 1) throw ValidationError("n_runs must be >= 1");
  if (!(cfg.t_end_s > 0.0)) throw ValidationError("t_end must be positive");
  if (cfg.acf_grid < 8) throw ValidationError("autocorrelation grid needs at least 8 points");

  const auto reactions = compile(design);
  const std::size_t ns = design.species.size();
  const double t0 = cfg.t_end_s / 2.0;
  const double window = cfg.t_end_s - t0;
  const double grid_dt = window / (cfg.acf_grid - 1);

  SsaOutcome out;
  out.mean.assign(ns, 0.0);
  out.variance.assign(ns, 0.0);
  std::vector<double> second(ns, 0.0);
  double osc_sum = 0.0;

  std::vector<long long> x(ns);
  std::vector<double> a(reactions.size());
  std::vector<double> run_mean(ns), run_second(ns);
  std::vector<double> grid(static_cast<std::size_t>(cfg.acf_grid));

  for (int run = 0; run < cfg.n_runs; ++run) {
    CounterRng rng{cfg.seed, static_cast<std::uint64_t>(run)};
    for (std::size_t i = 0; i < ns; ++i) x[i] = design.species[i].initial_count;
    std::fill(run_mean.begin(), run_mean.end(), 0.0);
    std::fill(run_second.begin(), run_second.end(), 0.0);
    double t = 0.0;
    std::size_t events = 0;
    std::size_t next_grid = 0;

    // Credits the current state over [from, to) clipped to the window and
    // records grid samples falling in it.
    auto hold = [&](double from, double to) {
      const double lo = std::max(from, t0);
      const double hi = std::min(to, cfg.t_end_s);
      if (hi > lo) {
        for (std::size_t i = 0; i < ns; ++i) {
          const auto v = static_cast<double>(x[i]);
          run_mean[i] += v * (hi - lo);
          run_second[i] += v * v * (hi - lo);
        }
      }
      while (next_grid < grid.size() && t0 + grid_dt * static_cast<double>(next_grid) < to) {
        grid[next_grid++] = static_cast<double>(x[0]);
      }
    };

    while (true) {
      double total = 0.0;
      for (std::size_t r = 0; r < reactions.size(); ++r) {
        a[r] = reactions[r].propensity(x);
        total += a[r];
      }
      if (total <= 0.0 || events >= cfg.max_events) {
        if (events >= cfg.max_events) ++out.capped_runs;
        hold(t, cfg.t_end_s + grid_dt);
        break;
      }
      const double dt = -std::log(rng.uniform_pos()) / total;
      if (t + dt >= cfg.t_end_s) {
        hold(t, cfg.t_end_s + grid_dt);
        break;
      }
      hold(t, t + dt);
      t += dt;
      double pick = rng.uniform() * total;
      std::size_t chosen = reactions.size() - 1;
      for (std::size_t r = 0; r < reactions.size(); ++r) {
        if (pick < a[r]) { chosen = r; break; }
        pick -= a[r];
      }
      // Zero-propensity reactions can never fire; guard the fall-through pick.
      while (a[chosen] <= 0.0 && chosen > 0) --chosen;
      for (const auto& [i, v] : reactions[chosen].delta) x[i] += v;
      ++events;
    }
    out.total_events += events;
    for (std::size_t i = 0; i < ns; ++i) {
      out.mean[i] += run_mean[i] / window;
      second[i] += run_second[i] / window;
    }
    osc_sum += first_acf_peak(grid);
  }

  const auto runs = static_cast<double>(cfg.n_runs);
  for (std::size_t i = 0; i < ns; ++i) {
    out.mean[i] /= runs;
    out.variance[i] = std::max(0.0, second[i] / runs - out.mean[i] * out.mean[i]);
  }
  out.oscillation_score = osc_sum / runs;
  return out;
}

}  // namespace invdes::oracles
