#include "invdes/domain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include "invdes/constraints.hpp"
#include "domains/common.hpp"

namespace invdes {

bool Domain::bind_generator(json&, Level, const Design&, CounterRng&) const { return true; }

bool Domain::usable_outcome(const Goal&, const Outcome& outcome) const {
  return std::all_of(outcome.metrics.begin(), outcome.metrics.end(),
                     [](const auto& kv) { return std::isfinite(kv.second); });
}

std::vector<std::string> Domain::invariant_errors(const Goal&, const json&) const { return {}; }

double Domain::parsimony(const Goal&, const Design&) const { return 0.0; }

namespace {

struct Registry {
  std::vector<std::string> ids;
  std::map<std::string, std::unique_ptr<Domain>> domains;

  Registry() {
    for (auto* make : {&detail::make_quantum_domain, &detail::make_thinfilm_domain,
                       &detail::make_controls_domain, &detail::make_filter_domain,
                       &detail::make_reactor_domain, &detail::make_heatx_domain,
                       &detail::make_pkpd_domain, &detail::make_ssa_domain,
                       &detail::make_alloy_domain, &detail::make_perturbation_domain}) {
      auto d = (*make)();
      ids.push_back(d->id());
      domains.emplace(d->id(), std::move(d));
    }
  }
};

const Registry& registry() {
  static const Registry r;
  return r;
}

}  // namespace

const std::vector<std::string>& domain_ids() { return registry().ids; }

const Domain& get_domain(const std::string& id) {
  auto it = registry().domains.find(id);
  if (it == registry().domains.end()) throw ContractError("unknown domain '" + id + "'");
  return *it->second;
}

bool has_domain(const std::string& id) { return registry().domains.count(id) > 0; }

std::vector<std::string> shape_errors(const Domain& domain, const json& params) {
  auto errs = domain.shape().type_errors(params);
  for (const auto& key : domain.shape().unknown_keys(params)) {
    errs.push_back(key + ": unexpected field");
  }
  return errs;
}

std::vector<std::string> validation_errors(const Domain& domain, const Goal& goal, const json& params) {
  auto errs = constraint_violations(params, goal.constraints);
  auto inv = domain.invariant_errors(goal, params);
  errs.insert(errs.end(), inv.begin(), inv.end());
  return errs;
}

std::vector<std::string> design_errors(const Domain& domain, const Goal& goal, const json& params) {
  auto errs = shape_errors(domain, params);
  if (!errs.empty()) return errs;
  return validation_errors(domain, goal, params);
}

namespace {
std::atomic<std::uint64_t> g_oracle_calls{0};
}  // namespace

Outcome run_oracle(const Domain& domain, const Goal& goal, const Design& design) {
  g_oracle_calls.fetch_add(1, std::memory_order_relaxed);
  return domain.simulate(goal, design);
}

std::uint64_t oracle_call_count() { return g_oracle_calls.load(std::memory_order_relaxed); }

Point clamp_point(const std::vector<Coordinate>& coords, Point x) {
  x.resize(coords.size(), 0.0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    double v = std::isfinite(x[i]) ? x[i] : detail::midpoint(c);
    if (c.type != CoordType::Real) v = std::round(v);
    x[i] = std::clamp(v, c.lo, c.hi);
  }
  return x;
}

Point sample_point(const std::vector<Coordinate>& coords, CounterRng& rng) {
  Point x(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    switch (c.type) {
      case CoordType::Real:
        x[i] = c.log_scale ? std::exp(rng.uniform(std::log(c.lo), std::log(c.hi))) : rng.uniform(c.lo, c.hi);
        x[i] = std::clamp(x[i], c.lo, c.hi);
        break;
      case CoordType::Integer:
        x[i] = static_cast<double>(rng.integer(std::llround(c.lo), std::llround(c.hi)));
        break;
      case CoordType::Categorical:
        x[i] = static_cast<double>(rng.integer(0, static_cast<long long>(c.choices.size()) - 1));
        break;
    }
  }
  return x;
}

double to_unit(const Coordinate& c, double x) {
  if (c.hi <= c.lo) return 0.0;
  if (c.log_scale) return (std::log(x) - std::log(c.lo)) / (std::log(c.hi) - std::log(c.lo));
  return (x - c.lo) / (c.hi - c.lo);
}

double from_unit(const Coordinate& c, double u) {
  u = std::clamp(u, 0.0, 1.0);
  if (c.log_scale) return std::exp(std::log(c.lo) + u * (std::log(c.hi) - std::log(c.lo)));
  return c.lo + u * (c.hi - c.lo);
}

Point point_from_unit(const std::vector<Coordinate>& coords, const std::vector<double>& u) {
  Point x(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    const double ui = i < u.size() ? std::clamp(u[i], 0.0, 1.0) : 0.5;
    if (c.type == CoordType::Real) {
      x[i] = from_unit(c, ui);
    } else {
      const double n = std::round(c.hi) - std::round(c.lo) + 1.0;
      x[i] = std::round(c.lo) + std::min(n - 1.0, std::floor(ui * n));
    }
  }
  return clamp_point(coords, std::move(x));
}

std::vector<MetricInfo> selectable_metrics(const Domain& domain, const json& context) {
  std::vector<MetricInfo> out;
  for (auto& m : domain.metrics(context)) {
    if (m.selectable) out.push_back(m);
  }
  return out;
}

}  // namespace invdes
