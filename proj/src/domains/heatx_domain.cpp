#include <algorithm>

#include "common.hpp"
#include "invdes/oracles/heatx.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

constexpr double kMinIdRatio = 0.6;
constexpr double kMaxIdRatio = 0.9;

StreamSpec to_stream(const json& s) {
  return {s.at("mass_flow_kg_s").get<double>(), s.at("inlet_K").get<double>(), s.at("cp_J_kgK").get<double>(),
          s.at("viscosity_Pa_s").get<double>(), s.at("conductivity_W_mK").get<double>()};
}

json stream_json(double m, double t, double cp, double mu, double k) {
  return {{"mass_flow_kg_s", m}, {"inlet_K", t}, {"cp_J_kgK", cp}, {"viscosity_Pa_s", mu},
          {"conductivity_W_mK", k}};
}

class HeatxDomain final : public Domain {
 public:
  HeatxDomain() {
    shape_ = Shape::object({Shape::req("n_tubes", Shape::integer(), "number of tubes"),
                            Shape::req("tube_length_m", Shape::number(), "tube length"),
                            Shape::req("tube_id_m", Shape::number(), "tube inner diameter"),
                            Shape::req("tube_od_m", Shape::number(), "tube outer diameter (> inner)"),
                            Shape::req("baffle_spacing_m", Shape::number(), "shell baffle spacing"),
                            Shape::req("n_passes", Shape::integer(), "tube passes: 1, 2 or 4")});
  }

  std::string id() const override { return "heatx"; }
  std::string summary() const override {
    return "Size a shell-and-tube heat exchanger; the hot stream flows in the tubes. lmtd_K is the "
           "pass-corrected mean temperature difference (duty / UA); U_W_m2K is referred to the outer tube area.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    MetricInfo eff{"effectiveness", TargetKind::Exact, 0.01, true};
    eff.ceiling = 1.0;
    return {{"duty_W", TargetKind::Exact, 0.0, true},
            eff,
            {"lmtd_K", TargetKind::Exact, 0.1, true},
            {"U_W_m2K", TargetKind::Exact, 0.0, true},
            {"hot_out_K", TargetKind::Exact, 0.0, false},
            {"cold_out_K", TargetKind::Exact, 0.0, false}};
  }

  json make_context(Level level, CounterRng& rng) const override {
    // Hot side ranges from water-like to light-oil properties at higher levels.
    const double oil = level >= Level::L3 ? rng.uniform(0.0, 1.0) : 0.0;
    const double hot_cp = 4180.0 - oil * 2100.0;
    const double hot_mu = 4e-4 + oil * 1.6e-3;
    const double hot_k = 0.66 - oil * 0.52;
    return {{"hot", stream_json(rng.uniform(1.0, 5.0), rng.uniform(340.0, 400.0), hot_cp, hot_mu, hot_k)},
            {"cold", stream_json(rng.uniform(1.0, 6.0), rng.uniform(280.0, 310.0), 4180.0, 8e-4, 0.60)},
            {"wall_conductivity_W_mK", by_level<double>(level, {50.0, 50.0, 16.0, 16.0})}};
  }

  std::vector<Constraint> make_constraints(Level level, const json&) const override {
    return {range_constraint("n_tubes", by_level<double>(level, {20, 10, 10, 5}),
                             by_level<double>(level, {150, 250, 400, 600})),
            range_constraint("tube_length_m", by_level<double>(level, {1.0, 0.8, 0.5, 0.5}),
                             by_level<double>(level, {4.0, 5.0, 6.0, 8.0})),
            range_constraint("tube_od_m", by_level<double>(level, {0.016, 0.012, 0.012, 0.010}),
                             by_level<double>(level, {0.030, 0.040, 0.040, 0.050})),
            range_constraint("tube_id_m", by_level<double>(level, {0.008, 0.006, 0.006, 0.005}),
                             by_level<double>(level, {0.028, 0.038, 0.038, 0.048})),
            range_constraint("baffle_spacing_m", by_level<double>(level, {0.1, 0.08, 0.06, 0.05}),
                             by_level<double>(level, {0.5, 0.8, 1.0, 1.0})),
            enum_constraint("n_passes", level == Level::L1 ? json::array({1, 2}) : json::array({1, 2, 4}))};
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    const auto nt = range_of(goal.constraints, "n_tubes");
    const auto len = range_of(goal.constraints, "tube_length_m");
    const auto od = range_of(goal.constraints, "tube_od_m");
    const auto baf = range_of(goal.constraints, "baffle_spacing_m");
    return {int_coord("n_tubes", std::llround(nt.first), std::llround(nt.second)),
            real_coord("tube_length_m", len.first, len.second),
            real_coord("tube_od_m", od.first, od.second),
            real_coord("id_over_od", kMinIdRatio, kMaxIdRatio),
            real_coord("baffle_spacing_m", baf.first, baf.second),
            cat_coord("n_passes", choices_of(goal.constraints, "n_passes"))};
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    const auto idr = range_of(goal.constraints, "tube_id_m");
    const double id_m = std::clamp(x[2] * x[3], idr.first, std::min(idr.second, x[2] * kMaxIdRatio));
    return {id(),
            {{"n_tubes", as_int(x[0])},
             {"tube_length_m", x[1]},
             {"tube_od_m", x[2]},
             {"tube_id_m", id_m},
             {"baffle_spacing_m", x[4]},
             {"n_passes", pick(coords[5], x[5])}}};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    const auto& p = d.params;
    const double od = num_or(p, "tube_od_m", midpoint(coords[2]));
    Point x{num_or(p, "n_tubes", midpoint(coords[0])), num_or(p, "tube_length_m", midpoint(coords[1])), od,
            num_or(p, "tube_id_m", od * midpoint(coords[3])) / od,
            num_or(p, "baffle_spacing_m", midpoint(coords[4])),
            p.contains("n_passes") ? index_in(coords[5], p.at("n_passes")) : 0.0};
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal&, const json& p) const override {
    std::vector<std::string> errs;
    if (!(p.at("tube_od_m").get<double>() > p.at("tube_id_m").get<double>())) {
      errs.push_back("tube_od_m: must exceed tube_id_m");
    }
    if (p.at("n_tubes").get<double>() < p.at("n_passes").get<double>()) {
      errs.push_back("n_tubes: must be at least n_passes");
    }
    return errs;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto& p = design.params;
    const HeatExchangerDesign d{static_cast<int>(p.at("n_tubes").get<double>()), p.at("tube_length_m").get<double>(),
                                p.at("tube_id_m").get<double>(), p.at("tube_od_m").get<double>(),
                                p.at("baffle_spacing_m").get<double>(),
                                static_cast<int>(p.at("n_passes").get<double>())};
    HeatExchangerConfig cfg;
    cfg.hot = to_stream(goal.context.at("hot"));
    cfg.cold = to_stream(goal.context.at("cold"));
    cfg.wall_conductivity_W_mK = goal.context.at("wall_conductivity_W_mK").get<double>();
    const auto r = simulate_heatx(d, cfg);
    return {id(),
            {{"duty_W", r.duty_W},
             {"effectiveness", r.effectiveness},
             {"lmtd_K", r.lmtd_K},
             {"U_W_m2K", r.U_W_m2K},
             {"hot_out_K", r.hot_out_K},
             {"cold_out_K", r.cold_out_K}}};
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_heatx_domain() { return std::make_unique<HeatxDomain>(); }

}  // namespace invdes::detail
