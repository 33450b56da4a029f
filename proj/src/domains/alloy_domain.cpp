#include <algorithm>
#include <numeric>

#include "common.hpp"
#include "invdes/oracles/alloy.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

// Elements unlock in this order as the level rises.
const std::vector<std::string> kElementOrder{"Fe", "Ni", "Cr", "Cu", "Al", "Ti", "Mn", "Mg", "Zn", "Si"};

class AlloyDomain final : public Domain {
 public:
  AlloyDomain() {
    shape_ = Shape::object({Shape::req("composition", Shape::map(Shape::number()),
                                       "element symbol -> mole fraction; fractions sum to 1"),
                            Shape::req("processing_temp_K", Shape::number(), "heat-treatment temperature")});
  }

  std::string id() const override { return "alloy"; }
  std::string summary() const override {
    return "Choose an alloy composition and processing temperature. Properties follow a rule of mixtures "
           "with solid-solution strengthening and melting-point depression.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    return {{"yield_strength_MPa", TargetKind::Exact, 0.0, true},
            {"density_g_cc", TargetKind::Exact, 0.0, true},
            {"melting_point_K", TargetKind::Exact, 0.0, true},
            {"cost_per_kg", TargetKind::Exact, 0.0, true}};
  }

  json make_context(Level level, CounterRng&) const override {
    const auto n = static_cast<long>(by_level<int>(level, {3, 5, 7, 10}));
    return {{"elements", std::vector<std::string>(kElementOrder.begin(), kElementOrder.begin() + n)},
            {"max_elements", by_level<int>(level, {2, 3, 4, 5})}};
  }

  std::vector<Constraint> make_constraints(Level level, const json& ctx) const override {
    return {enum_constraint("composition.@keys", ctx.at("elements")),
            range_constraint("composition.*", 0.0, 1.0),
            sum_constraint("composition", kCompositionSumTolerance),
            count_constraint("composition", ctx.at("max_elements").get<long long>()),
            range_constraint("processing_temp_K", by_level<double>(level, {700, 600, 500, 400}),
                             by_level<double>(level, {1000, 1100, 1200, 1400}))};
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    std::vector<Coordinate> c;
    for (const auto& e : choices_of(goal.constraints, "composition.@keys")) {
      c.push_back(real_coord("w_" + e.get<std::string>(), 0.0, 1.0));
    }
    const auto t = range_of(goal.constraints, "processing_temp_K");
    c.push_back(real_coord("processing_temp_K", t.first, t.second));
    return c;
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    const auto elements = choices_of(goal.constraints, "composition.@keys");
    const auto k = static_cast<std::size_t>(max_count_of(goal.constraints, "composition").value_or(1));
    std::vector<std::size_t> order(elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] > x[b]; });
    order.resize(std::min(k, order.size()));
    double total = 0.0;
    for (auto i : order) total += x[i];
    json comp = json::object();
    if (total <= 0.0) {
      comp[elements[0].get<std::string>()] = 1.0;
    } else {
      for (auto i : order) {
        if (x[i] > 0.0) comp[elements[i].get<std::string>()] = x[i] / total;
      }
    }
    return {id(), {{"composition", comp}, {"processing_temp_K", x.back()}}};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    const auto elements = choices_of(goal.constraints, "composition.@keys");
    Point x(coords.size(), 0.0);
    const json comp = d.params.value("composition", json::object());
    for (std::size_t i = 0; i < elements.size(); ++i) x[i] = num_or(comp, elements[i].get<std::string>().c_str(), 0.0);
    x.back() = num_or(d.params, "processing_temp_K", midpoint(coords.back()));
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    std::vector<std::string> errs;
    if (p.at("composition").empty()) errs.push_back("composition: at least one element is required");
    if (!(p.at("processing_temp_K").get<double>() > 0.0)) errs.push_back("processing_temp_K: must be positive");
    return errs;
  }

  Outcome simulate(const Goal&, const Design& design) const override {
    AlloyDesign d;
    for (const auto& [k, v] : design.params.at("composition").items()) d.composition[k] = v.get<double>();
    d.processing_temp_K = design.params.at("processing_temp_K").get<double>();
    const auto r = evaluate_alloy(d);
    return {id(),
            {{"yield_strength_MPa", r.yield_strength_MPa},
             {"density_g_cc", r.density_g_cc},
             {"melting_point_K", r.melting_point_K},
             {"cost_per_kg", r.cost_per_kg}}};
  }

  double parsimony(const Goal& goal, const Design& d) const override {
    const double k = static_cast<double>(max_count_of(goal.constraints, "composition").value_or(1));
    if (k <= 1.0) return 1.0;
    return std::clamp(1.0 - (static_cast<double>(d.params.at("composition").size()) - 1.0) / (k - 1.0), 0.0, 1.0);
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_alloy_domain() { return std::make_unique<AlloyDomain>(); }

}  // namespace invdes::detail
