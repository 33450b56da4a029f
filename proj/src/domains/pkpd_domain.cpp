#include <algorithm>

#include "common.hpp"
#include "invdes/oracles/pkpd.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

class PkpdDomain final : public Domain {
 public:
  PkpdDomain() {
    shape_ = Shape::object({Shape::req("dose_mg", Shape::number(), "oral dose per administration"),
                            Shape::req("frequency_hours", Shape::number(), "dosing interval: 4, 6, 8, 12 or 24")});
  }

  std::string id() const override { return "pkpd"; }
  std::string summary() const override {
    return "Choose an oral dosing regimen. Concentrations are central-compartment mg/L; cmax, cmin and "
           "auc_0_24 are taken over hours 12-36 of therapy (first dose at t = 0).";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    return {{"cmax_mg_L", TargetKind::Exact, 0.01, true},
            {"auc_0_24", TargetKind::Exact, 0.1, true},
            {"cmin_mg_L", TargetKind::Exact, 0.01, true},
            {"half_life_hr", TargetKind::Exact, 0.0, false}};
  }

  json make_context(Level level, CounterRng& rng) const override {
    json c = {{"ka_per_hr", rng.uniform(0.3, 2.0)},
              {"F", rng.uniform(0.5, 1.0)},
              {"CL_L_per_hr", rng.uniform(2.0, 15.0)},
              {"V_L", rng.uniform(30.0, 150.0)}};
    if (level >= Level::L3) {
      c["k12_per_hr"] = rng.uniform(0.1, 0.5);
      c["k21_per_hr"] = rng.uniform(0.05, 0.3);
    }
    return c;
  }

  std::vector<Constraint> make_constraints(Level level, const json&) const override {
    const std::array<json, 4> freq{json::array({8, 12, 24}), json::array({6, 8, 12, 24}),
                                   json::array({4, 6, 8, 12, 24}), json::array({4, 6, 8, 12, 24})};
    return {range_constraint("dose_mg", by_level<double>(level, {50, 25, 10, 5}),
                             by_level<double>(level, {1000, 1500, 2000, 3000})),
            enum_constraint("frequency_hours", freq[static_cast<std::size_t>(static_cast<int>(level) - 1)])};
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    const auto dose = range_of(goal.constraints, "dose_mg");
    return {real_coord("dose_mg", dose.first, dose.second, true),
            cat_coord("frequency_hours", choices_of(goal.constraints, "frequency_hours"))};
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    return {id(), {{"dose_mg", x[0]}, {"frequency_hours", pick(coords[1], x[1])}}};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    Point x{num_or(d.params, "dose_mg", midpoint(coords[0])),
            d.params.contains("frequency_hours") ? index_in(coords[1], d.params.at("frequency_hours"))
                                                 : midpoint(coords[1])};
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    std::vector<std::string> errs;
    if (!(p.at("dose_mg").get<double>() > 0.0)) errs.push_back("dose_mg: must be positive");
    if (!allowed_dosing_frequency(p.at("frequency_hours").get<double>())) {
      errs.push_back("frequency_hours: must be one of 4, 6, 8, 12, 24");
    }
    return errs;
  }

  static PkParameters parameters(const json& c) {
    PkParameters pk;
    pk.ka = c.at("ka_per_hr").get<double>();
    pk.F = c.at("F").get<double>();
    pk.CL = c.at("CL_L_per_hr").get<double>();
    pk.V = c.at("V_L").get<double>();
    if (c.contains("k12_per_hr")) {
      pk.k12 = c.at("k12_per_hr").get<double>();
      pk.k21 = c.at("k21_per_hr").get<double>();
    }
    return pk;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const DosingDesign d{design.params.at("dose_mg").get<double>(),
                         design.params.at("frequency_hours").get<double>()};
    const auto r = simulate_pkpd(d, parameters(goal.context));
    return {id(),
            {{"cmax_mg_L", r.cmax_mg_L},
             {"auc_0_24", r.auc_0_24},
             {"cmin_mg_L", r.cmin_mg_L},
             {"half_life_hr", r.half_life_hr}}};
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_pkpd_domain() { return std::make_unique<PkpdDomain>(); }

}  // namespace invdes::detail
