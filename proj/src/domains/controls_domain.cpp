#include <algorithm>

#include "common.hpp"
#include "invdes/oracles/controls.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

PidDesign to_pid(const json& p) {
  PidDesign d;
  d.kp = p.at("Kp").get<double>();
  d.ki = p.at("Ki").get<double>();
  d.kd = p.at("Kd").get<double>();
  if (p.contains("filter_N")) d.filter_n = p.at("filter_N").get<double>();
  return d;
}

class ControlsDomain final : public Domain {
 public:
  ControlsDomain() {
    shape_ = Shape::object({Shape::req("Kp", Shape::number(), "proportional gain"),
                            Shape::req("Ki", Shape::number(), "integral gain"),
                            Shape::req("Kd", Shape::number(), "derivative gain"),
                            Shape::opt("filter_N", Shape::number(),
                                       "derivative filter coefficient: Kd*N*s/(s+N)")});
  }

  std::string id() const override { return "controls"; }
  std::string summary() const override {
    return "Tune a PID controller in unity feedback with the task's plant. Metrics come from the unit "
           "step response: overshoot (%), 2% settling time, 10-90% rise time, |1 - final value|.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    return {{"overshoot_pct", TargetKind::Exact, 0.5, true},
            {"settling_time_s", TargetKind::Exact, 0.0, true},
            {"rise_time_s", TargetKind::Exact, 0.0, true},
            {"steady_state_error", TargetKind::Exact, 0.005, true}};
  }

  json make_context(Level level, CounterRng& rng) const override {
    const double k = rng.uniform(0.5, 2.0);
    Poly den;
    switch (level) {
      case Level::L1: den = {rng.uniform(0.5, 3.0), 1.0}; break;
      case Level::L2: den = poly_mul({rng.uniform(0.5, 3.0), 1.0}, {rng.uniform(0.1, 1.0), 1.0}); break;
      case Level::L3: den = {rng.uniform(0.2, 2.0), 1.0, 0.0}; break;
      case Level::L4:
        den = poly_mul(poly_mul({rng.uniform(0.2, 2.0), 1.0}, {rng.uniform(0.2, 2.0), 1.0}),
                       {rng.uniform(0.2, 2.0), 1.0});
        break;
    }
    const char* kind[] = {"first_order", "second_order", "integrating", "third_order"};
    return {{"plant", {{"num", {k}}, {"den", den}}},
            {"plant_kind", kind[static_cast<int>(level) - 1]},
            {"derivative_filter", level >= Level::L3}};
  }

  std::vector<Constraint> make_constraints(Level level, const json& ctx) const override {
    std::vector<Constraint> c{range_constraint("Kp", 0.0, by_level<double>(level, {5, 10, 20, 40})),
                              range_constraint("Ki", 0.0, by_level<double>(level, {2, 5, 5, 20})),
                              range_constraint("Kd", 0.0, by_level<double>(level, {0.5, 2, 5, 10}))};
    if (ctx.value("derivative_filter", false)) c.push_back(range_constraint("filter_N", 2.0, 100.0));
    return c;
  }

  bool usable_outcome(const Goal& goal, const Outcome& o) const override {
    if (!Domain::usable_outcome(goal, o)) return false;
    // Loops that never settle inside the horizon make poor targets.
    return o.metrics.at("overshoot_pct") < 100.0 && o.metrics.at("settling_time_s") < kUnstableSentinel &&
           o.metrics.at("steady_state_error") < 0.5;
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    std::vector<Coordinate> c;
    for (const char* g : {"Kp", "Ki", "Kd"}) {
      const auto r = range_of(goal.constraints, g);
      c.push_back(real_coord(g, r.first, r.second));
    }
    if (find_constraint(goal.constraints, "filter_N", BoundKind::Range)) {
      const auto r = range_of(goal.constraints, "filter_N");
      c.push_back(real_coord("filter_N", r.first, r.second, true));
    }
    return c;
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    json p = {{"Kp", x[0]}, {"Ki", x[1]}, {"Kd", x[2]}};
    if (coords.size() > 3) p["filter_N"] = x[3];
    return {id(), p};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    Point x{num_or(d.params, "Kp", 0.0), num_or(d.params, "Ki", 0.0), num_or(d.params, "Kd", 0.0)};
    if (coords.size() > 3) x.push_back(num_or(d.params, "filter_N", midpoint(coords[3])));
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    std::vector<std::string> errs;
    for (const char* g : {"Kp", "Ki", "Kd"}) {
      if (p.at(g).get<double>() < 0.0) errs.push_back(std::string(g) + ": gains must be non-negative");
    }
    if (p.contains("filter_N") && !(p.at("filter_N").get<double>() > 0.0)) {
      errs.push_back("filter_N: must be positive");
    }
    return errs;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto& plant = goal.context.at("plant");
    const TransferFunction tf{plant.at("num").get<Poly>(), plant.at("den").get<Poly>()};
    const auto m = simulate_controls(to_pid(design.params), tf);
    return {id(),
            {{"overshoot_pct", m.overshoot_pct},
             {"settling_time_s", m.settling_time_s},
             {"rise_time_s", m.rise_time_s},
             {"steady_state_error", m.steady_state_error}}};
  }

  double parsimony(const Goal&, const Design& d) const override {
    int zero = 0;
    for (const char* g : {"Kp", "Ki", "Kd"}) zero += num_or(d.params, g, 0.0) == 0.0 ? 1 : 0;
    return zero / 3.0;
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_controls_domain() { return std::make_unique<ControlsDomain>(); }

}  // namespace invdes::detail
