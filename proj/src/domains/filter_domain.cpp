#include <algorithm>

#include "common.hpp"
#include "invdes/oracles/filter.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

constexpr double kMinBandGap = 0.02;

FilterDesign to_filter(const json& p) {
  FilterDesign d;
  d.family = filter_family_from_string(p.at("family").get<std::string>());
  d.response = filter_response_from_string(p.at("response").get<std::string>());
  d.order = static_cast<int>(std::llround(p.at("order").get<double>()));
  d.cutoffs = p.at("cutoffs").get<std::vector<double>>();
  if (p.contains("ripple_db")) d.ripple_db = p.at("ripple_db").get<double>();
  if (p.contains("attenuation_db")) d.attenuation_db = p.at("attenuation_db").get<double>();
  return d;
}

class FilterDomain final : public Domain {
 public:
  FilterDomain() {
    shape_ = Shape::object(
        {Shape::req("family", Shape::string(), "butterworth | chebyshev1 | chebyshev2"),
         Shape::req("order", Shape::integer(), "filter order"),
         Shape::req("response", Shape::string(), "lowpass | highpass | bandpass | bandstop"),
         Shape::req("cutoffs", Shape::array(Shape::number()),
                    "edge frequencies as a fraction of Nyquist; two increasing values for band filters; "
                    "for chebyshev2 these are stopband edges"),
         Shape::opt("ripple_db", Shape::number(), "chebyshev1 passband ripple (default 1 dB)"),
         Shape::opt("attenuation_db", Shape::number(), "chebyshev2 stopband attenuation (default 40 dB)")});
  }

  std::string id() const override { return "filter"; }
  std::string summary() const override {
    return "Design an IIR digital filter (analog prototype + bilinear transform). Frequencies are fractions "
           "of Nyquist; passband and stopband masks exclude 25% guard bands next to each cutoff; group delay "
           "is in samples.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    return {{"cutoff_minus3db", TargetKind::Exact, 0.0, true},
            {"stopband_attenuation_db", TargetKind::MinBound, 0.0, true},
            {"passband_ripple_db", TargetKind::Exact, 0.05, true},
            {"transition_bandwidth", TargetKind::Exact, 0.005, true},
            {"group_delay_variation", TargetKind::Exact, 0.1, true}};
  }

  json make_context(Level level, CounterRng&) const override {
    const std::vector<std::vector<std::string>> families{
        {"butterworth"}, {"butterworth", "chebyshev1"}, {"butterworth", "chebyshev1", "chebyshev2"},
        {"butterworth", "chebyshev1", "chebyshev2"}};
    const std::vector<std::vector<std::string>> responses{
        {"lowpass"}, {"lowpass", "highpass"}, {"lowpass", "highpass", "bandpass", "bandstop"},
        {"lowpass", "highpass", "bandpass", "bandstop"}};
    const auto i = static_cast<std::size_t>(static_cast<int>(level) - 1);
    return {{"grid_points", kDefaultFilterGrid},
            {"families", families[i]},
            {"responses", responses[i]},
            {"max_order", by_level<int>(level, {4, 6, 8, 10})}};
  }

  std::vector<Constraint> make_constraints(Level, const json& ctx) const override {
    return {enum_constraint("family", ctx.at("families")),
            enum_constraint("response", ctx.at("responses")),
            range_constraint("order", 1, ctx.at("max_order").get<double>()),
            count_constraint("cutoffs", 2),
            range_constraint("cutoffs[]", 0.05, 0.95),
            range_constraint("ripple_db", 0.1, 3.0),
            range_constraint("attenuation_db", 20.0, 80.0)};
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    const auto order = range_of(goal.constraints, "order");
    const auto cut = range_of(goal.constraints, "cutoffs[]");
    const auto rip = range_of(goal.constraints, "ripple_db");
    const auto att = range_of(goal.constraints, "attenuation_db");
    return {cat_coord("family", choices_of(goal.constraints, "family")),
            cat_coord("response", choices_of(goal.constraints, "response")),
            int_coord("order", std::llround(order.first), std::llround(order.second)),
            real_coord("cutoff_a", cut.first, cut.second),
            real_coord("cutoff_b", cut.first, cut.second),
            real_coord("ripple_db", rip.first, rip.second),
            real_coord("attenuation_db", att.first, att.second)};
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    const std::string family = pick(coords[0], x[0]).get<std::string>();
    const std::string response = pick(coords[1], x[1]).get<std::string>();
    json p = {{"family", family}, {"response", response}, {"order", as_int(x[2])}};
    if (response == "bandpass" || response == "bandstop") {
      double a = std::min(x[3], x[4]), b = std::max(x[3], x[4]);
      if (b - a < kMinBandGap) {
        b = std::min(coords[4].hi, a + kMinBandGap);
        a = b - kMinBandGap;
      }
      p["cutoffs"] = {a, b};
    } else {
      p["cutoffs"] = {x[3]};
    }
    if (family == "chebyshev1") p["ripple_db"] = x[5];
    if (family == "chebyshev2") p["attenuation_db"] = x[6];
    return {id(), p};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    Point x(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) x[i] = midpoint(coords[i]);
    const auto& p = d.params;
    x[0] = index_in(coords[0], p.at("family"));
    x[1] = index_in(coords[1], p.at("response"));
    x[2] = p.at("order").get<double>();
    const auto& c = p.at("cutoffs");
    if (!c.empty()) x[3] = x[4] = c[0].get<double>();
    if (c.size() > 1) x[4] = c[1].get<double>();
    x[5] = num_or(p, "ripple_db", x[5]);
    x[6] = num_or(p, "attenuation_db", x[6]);
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    std::vector<std::string> errs;
    const auto family = p.at("family").get<std::string>();
    if (family == "elliptic") errs.push_back("family: elliptic filters are not supported");
    const auto response = p.at("response").get<std::string>();
    const bool band = response == "bandpass" || response == "bandstop";
    const auto& c = p.at("cutoffs");
    if (c.size() != (band ? 2u : 1u)) {
      errs.push_back(std::string("cutoffs: ") + (band ? "band filters need two cutoffs" : "expected one cutoff"));
    } else if (band && !(c[0].get<double>() < c[1].get<double>())) {
      errs.push_back("cutoffs: band edges must be strictly increasing");
    }
    return errs;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto m = design_filter(to_filter(design.params), goal.context.value("grid_points", kDefaultFilterGrid));
    return {id(),
            {{"cutoff_minus3db", m.cutoff_minus3db},
             {"stopband_attenuation_db", m.stopband_attenuation_db},
             {"passband_ripple_db", m.passband_ripple_db},
             {"transition_bandwidth", m.transition_bandwidth},
             {"group_delay_variation", m.group_delay_variation}}};
  }

  double parsimony(const Goal&, const Design& d) const override {
    return 1.0 - num_or(d.params, "order", kMaxFilterOrder) / kMaxFilterOrder;
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_filter_domain() { return std::make_unique<FilterDomain>(); }

}  // namespace invdes::detail
