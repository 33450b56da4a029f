#include <algorithm>

#include "common.hpp"
#include "invdes/oracles/reactor.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

const char* const kFields[] = {"volume_L", "flow_L_per_s", "feed_conc_mol_L", "temperature_K", "coolant_K"};

class ReactorDomain final : public Domain {
 public:
  ReactorDomain() {
    shape_ = Shape::object({Shape::req("volume_L", Shape::number(), "reactor volume"),
                            Shape::req("flow_L_per_s", Shape::number(), "volumetric feed flow"),
                            Shape::req("feed_conc_mol_L", Shape::number(), "feed concentration of A"),
                            Shape::req("temperature_K", Shape::number(), "feed temperature"),
                            Shape::req("coolant_K", Shape::number(), "jacket coolant temperature")});
  }

  std::string id() const override { return "reactor"; }
  std::string summary() const override {
    return "Size and operate a continuous stirred-tank reactor at steady state. B is the desired product; "
           "selectivity is B formed per A consumed, yield is c_B/c_A0, productivity is mol B per second.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json& ctx) const override {
    const bool single = ctx.value("system", std::string("series")) == "single";
    MetricInfo conv{"conversion", TargetKind::Exact, 0.01, true};
    MetricInfo sel{"selectivity", TargetKind::Exact, 0.01, !single};
    MetricInfo yld{"yield", TargetKind::Exact, 0.01, true};
    conv.ceiling = sel.ceiling = yld.ceiling = 1.0;
    return {conv, sel, yld, {"productivity", TargetKind::Exact, 1e-4, true}};
  }

  json make_context(Level level, CounterRng& rng) const override {
    const char* system = by_level<const char*>(level, {"single", "parallel", "series", "series"});
    // Activation energies in J/mol; pre-exponentials set from the rate at 350 K.
    const double e1 = rng.uniform(50e3, 80e3);
    const double k1_ref = std::exp(rng.uniform(std::log(0.005), std::log(0.05)));
    const double e2 = rng.uniform(60e3, 100e3);
    const double k2_ref = std::exp(rng.uniform(std::log(0.002), std::log(0.03)));
    const double rt = kGasConstant * 350.0;
    return {{"system", system},
            {"A1_per_s", k1_ref * std::exp(e1 / rt)},
            {"E1_J_mol", e1},
            {"A2_per_s", std::string(system) == "single" ? 0.0 : k2_ref * std::exp(e2 / rt)},
            {"E2_J_mol", e2},
            {"ua_over_rho_cp_L_s", rng.uniform(0.0, 0.5)}};
  }

  std::vector<Constraint> make_constraints(Level level, const json&) const override {
    return {range_constraint("volume_L", by_level<double>(level, {50, 20, 10, 5}),
                             by_level<double>(level, {500, 1000, 2000, 5000})),
            range_constraint("flow_L_per_s", by_level<double>(level, {0.5, 0.2, 0.1, 0.05}),
                             by_level<double>(level, {5, 8, 10, 20})),
            range_constraint("feed_conc_mol_L", by_level<double>(level, {0.5, 0.2, 0.1, 0.1}),
                             by_level<double>(level, {2, 3, 4, 5})),
            range_constraint("temperature_K", by_level<double>(level, {320, 310, 300, 290}),
                             by_level<double>(level, {380, 390, 400, 420})),
            range_constraint("coolant_K", by_level<double>(level, {300, 290, 280, 270}),
                             by_level<double>(level, {360, 370, 380, 400}))};
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    std::vector<Coordinate> c;
    for (const char* f : kFields) {
      const auto r = range_of(goal.constraints, f);
      const bool log_scale = std::string(f) == "volume_L" || std::string(f) == "flow_L_per_s";
      c.push_back(real_coord(f, r.first, r.second, log_scale));
    }
    return c;
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const Point x = clamp_point(coordinates(goal), x_in);
    json p = json::object();
    for (std::size_t i = 0; i < 5; ++i) p[kFields[i]] = x[i];
    return {id(), p};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    Point x(5);
    for (std::size_t i = 0; i < 5; ++i) x[i] = num_or(d.params, kFields[i], midpoint(coords[i]));
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    std::vector<std::string> errs;
    for (const char* f : kFields) {
      if (!(p.at(f).get<double>() > 0.0)) errs.push_back(std::string(f) + ": must be positive");
    }
    return errs;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto& p = design.params;
    const auto& c = goal.context;
    const ReactorDesign d{p.at("volume_L").get<double>(), p.at("flow_L_per_s").get<double>(),
                          p.at("feed_conc_mol_L").get<double>(), p.at("temperature_K").get<double>(),
                          p.at("coolant_K").get<double>()};
    const ReactorKinetics k{reaction_system_from_string(c.at("system").get<std::string>()),
                            c.at("A1_per_s").get<double>(), c.at("E1_J_mol").get<double>(),
                            c.at("A2_per_s").get<double>(), c.at("E2_J_mol").get<double>(),
                            c.at("ua_over_rho_cp_L_s").get<double>()};
    const auto r = simulate_reactor(d, k);
    return {id(),
            {{"conversion", r.conversion},
             {"selectivity", r.selectivity},
             {"yield", r.yield},
             {"productivity", r.productivity}}};
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_reactor_domain() { return std::make_unique<ReactorDomain>(); }

}  // namespace invdes::detail
