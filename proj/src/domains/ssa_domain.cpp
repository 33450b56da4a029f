#include <algorithm>
#include <set>

#include "common.hpp"
#include "invdes/oracles/ssa.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

const std::vector<std::string> kSpeciesPool{"A", "B", "C", "D"};
constexpr long long kMaxInitialCount = 50;
constexpr double kExtinctFloor = 0.5;

// Reaction templates over species indices a and b.
enum Template { Birth, Death, Convert, Catalyse, Annihilate, Autocatalyse, kTemplates };

SsaNetworkDesign to_network(const json& p) {
  SsaNetworkDesign d;
  for (const auto& s : p.at("species")) {
    d.species.push_back({s.at("name").get<std::string>(), std::llround(s.at("initial_count").get<double>())});
  }
  for (const auto& r : p.at("reactions")) {
    SsaReaction rx;
    for (const auto& [k, v] : r.at("reactants").items()) rx.reactants[k] = static_cast<int>(std::llround(v.get<double>()));
    for (const auto& [k, v] : r.at("products").items()) rx.products[k] = static_cast<int>(std::llround(v.get<double>()));
    rx.rate_constant = r.at("rate_constant").get<double>();
    d.reactions.push_back(std::move(rx));
  }
  return d;
}

void add(json& side, const std::string& s) { side[s] = side.value(s, 0) + 1; }

json make_reaction(int t, const std::string& a, const std::string& b, double rate) {
  json in = json::object(), out = json::object();
  switch (t) {
    case Birth: add(out, a); break;
    case Death: add(in, a); break;
    case Convert: add(in, a); add(out, b); break;
    case Catalyse: add(in, a); add(out, a); add(out, b); break;
    case Annihilate: add(in, a); add(in, b); break;
    case Autocatalyse: add(in, a); add(in, b); add(out, b); add(out, b); break;
    default: break;
  }
  return {{"reactants", in}, {"products", out}, {"rate_constant", rate}};
}

class SsaDomain final : public Domain {
 public:
  SsaDomain() {
    const auto stoich = Shape::map(Shape::integer(), "species name -> stoichiometric coefficient");
    shape_ = Shape::object(
        {Shape::req("species",
                    Shape::array(Shape::object({Shape::req("name", Shape::string()),
                                                Shape::req("initial_count", Shape::integer())})),
                    "the first species is the reporter"),
         Shape::req("reactions",
                    Shape::array(Shape::object({Shape::req("reactants", stoich), Shape::req("products", stoich),
                                                Shape::req("rate_constant", Shape::number(),
                                                           "mass-action stochastic rate constant")})))});
  }

  std::string id() const override { return "ssa"; }
  std::string summary() const override {
    return "Design a stochastic reaction network simulated with the Gillespie algorithm. Statistics are time "
           "averages over the second half of each run, pooled across runs; the first species is the reporter.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    MetricInfo cap{"capped_fraction", TargetKind::Exact, 0.0, false};
    return {{"reporter_mean", TargetKind::Exact, kExtinctFloor, true},
            {"reporter_variance", TargetKind::Exact, 0.5, true},
            {"oscillation_score", TargetKind::Exact, 0.05, true},
            {"total_mean", TargetKind::Exact, 0.5, true},
            cap};
  }

  json make_context(Level level, CounterRng&) const override {
    return {{"max_species", by_level<int>(level, {1, 2, 3, 4})},
            {"max_reactions", by_level<int>(level, {2, 4, 6, 8})},
            {"t_end_s", 20.0},
            {"n_runs", 32},
            {"max_events", 4000}};
  }

  std::vector<Constraint> make_constraints(Level, const json& ctx) const override {
    const auto n = ctx.at("max_species").get<std::size_t>();
    const json names(std::vector<std::string>(kSpeciesPool.begin(), kSpeciesPool.begin() + static_cast<long>(n)));
    return {count_constraint("species", static_cast<long long>(n)),
            enum_constraint("species[].name", names),
            range_constraint("species[].initial_count", 0, kMaxInitialCount),
            count_constraint("reactions", ctx.at("max_reactions").get<long long>()),
            range_constraint("reactions[].rate_constant", 0.01, 10.0),
            enum_constraint("reactions[].reactants.@keys", names),
            enum_constraint("reactions[].products.@keys", names),
            range_constraint("reactions[].reactants.*", 1, 2),
            range_constraint("reactions[].products.*", 1, 2)};
  }

  bool usable_outcome(const Goal& goal, const Outcome& o) const override {
    // An extinct reporter turns every target into a free bound.
    return Domain::usable_outcome(goal, o) && o.metrics.at("capped_fraction") == 0.0 &&
           o.metrics.at("reporter_mean") >= kExtinctFloor;
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    const long long ns = max_count_of(goal.constraints, "species").value_or(1);
    const long long nr = max_count_of(goal.constraints, "reactions").value_or(1);
    const auto cnt = range_of(goal.constraints, "species[].initial_count");
    const auto rate = range_of(goal.constraints, "reactions[].rate_constant");
    std::vector<Coordinate> c{int_coord("n_species", 1, ns)};
    for (long long i = 0; i < ns; ++i) {
      c.push_back(int_coord("count" + std::to_string(i), std::llround(cnt.first), std::llround(cnt.second)));
    }
    c.push_back(int_coord("n_reactions", 1, nr));
    for (long long r = 0; r < nr; ++r) {
      const std::string p = "r" + std::to_string(r) + ".";
      c.push_back(int_coord(p + "template", 0, kTemplates - 1));
      c.push_back(int_coord(p + "a", 0, ns - 1));
      c.push_back(int_coord(p + "b_offset", 0, std::max(0LL, ns - 2)));
      c.push_back(real_coord(p + "rate", rate.first, rate.second, true));
    }
    return c;
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    const long long ns_max = max_count_of(goal.constraints, "species").value_or(1);
    const auto n = as_int(x[0]);
    json species = json::array();
    for (long long i = 0; i < n; ++i) {
      species.push_back({{"name", kSpeciesPool[static_cast<std::size_t>(i)]}, {"initial_count", as_int(x[1 + i])}});
    }
    const std::size_t base = 1 + static_cast<std::size_t>(ns_max);
    json reactions = json::array();
    for (long long r = 0; r < as_int(x[base]); ++r) {
      const std::size_t b = base + 1 + 4 * static_cast<std::size_t>(r);
      int t = static_cast<int>(as_int(x[b]));
      const auto a = as_int(x[b + 1]) % n;
      const auto other = (a + 1 + as_int(x[b + 2])) % n;
      if (n == 1 && t >= Convert) t %= 2;  // two-species templates need a partner
      reactions.push_back(make_reaction(t, kSpeciesPool[static_cast<std::size_t>(a)],
                                        kSpeciesPool[static_cast<std::size_t>(other)], x[b + 3]));
    }
    return {id(), {{"species", species}, {"reactions", reactions}}};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    Point x(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) x[i] = midpoint(coords[i]);
    const long long ns_max = max_count_of(goal.constraints, "species").value_or(1);
    const auto& sp = d.params.at("species");
    std::map<std::string, long long> index;
    x[0] = static_cast<double>(std::max<std::size_t>(1, sp.size()));
    for (std::size_t i = 0; i < sp.size() && static_cast<long long>(i) < ns_max; ++i) {
      x[1 + i] = sp[i].at("initial_count").get<double>();
      index[sp[i].at("name").get<std::string>()] = static_cast<long long>(i);
    }
    const std::size_t base = 1 + static_cast<std::size_t>(ns_max);
    const std::size_t slots = (coords.size() - base - 1) / 4;
    const auto& rx = d.params.at("reactions");
    x[base] = static_cast<double>(std::min(rx.size(), slots));
    const auto n = std::max<long long>(1, static_cast<long long>(sp.size()));
    for (std::size_t r = 0; r < std::min(rx.size(), slots); ++r) {
      const std::size_t b = base + 1 + 4 * r;
      const auto& in = rx[r].at("reactants");
      const auto& out = rx[r].at("products");
      // Best-effort template recovery from the stoichiometry.
      std::vector<long long> ins, outs;
      for (const auto& [k, v] : in.items()) ins.insert(ins.end(), v.get<std::size_t>(), index.count(k) ? index[k] : 0);
      for (const auto& [k, v] : out.items()) outs.insert(outs.end(), v.get<std::size_t>(), index.count(k) ? index[k] : 0);
      long long a = 0, other = 0;
      int t = Death;
      if (ins.empty()) {
        t = Birth;
        if (!outs.empty()) a = outs[0];
      } else if (ins.size() == 1) {
        a = ins[0];
        if (outs.size() == 1) t = Convert, other = outs[0];
        if (outs.size() == 2) t = Catalyse, other = outs[0] == a ? outs[1] : outs[0];
      } else {
        a = ins[0];
        other = ins[1];
        t = outs.empty() ? Annihilate : Autocatalyse;
        // The doubled product is the autocatalytic partner.
        if (t == Autocatalyse && outs[0] == a) std::swap(a, other);
      }
      x[b] = t;
      x[b + 1] = static_cast<double>(a);
      x[b + 2] = static_cast<double>(((other - a - 1) % n + n) % n);
      x[b + 3] = num_or(rx[r], "rate_constant", x[b + 3]);
    }
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    auto errs = network_errors(to_network(p));
    if (p.at("species").empty()) errs.push_back("species: at least one species is required");
    return errs;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto net = to_network(design.params);
    SsaConfig cfg;
    cfg.t_end_s = goal.context.value("t_end_s", cfg.t_end_s);
    cfg.n_runs = goal.context.value("n_runs", cfg.n_runs);
    cfg.max_events = goal.context.value("max_events", cfg.max_events);
    cfg.seed = goal.seed;
    const auto r = simulate_ssa(net, cfg);
    double total = 0.0;
    for (double m : r.mean) total += m;
    return {id(),
            {{"reporter_mean", r.mean.empty() ? 0.0 : r.mean[0]},
             {"reporter_variance", r.variance.empty() ? 0.0 : r.variance[0]},
             {"oscillation_score", r.oscillation_score},
             {"total_mean", total},
             {"capped_fraction", static_cast<double>(r.capped_runs) / std::max(1, cfg.n_runs)}}};
  }

  double parsimony(const Goal& goal, const Design& d) const override {
    const double nr = static_cast<double>(max_count_of(goal.constraints, "reactions").value_or(kMaxReactions));
    return std::clamp(1.0 - static_cast<double>(d.params.at("reactions").size()) / nr, 0.0, 1.0);
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_ssa_domain() { return std::make_unique<SsaDomain>(); }

}  // namespace invdes::detail
