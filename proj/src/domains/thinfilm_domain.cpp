#include <algorithm>
#include <numeric>

#include "common.hpp"
#include "invdes/oracles/thinfilm.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

constexpr int kBandPoints = 31;
constexpr double kBandLo = 400.0;
constexpr double kBandHi = 700.0;

ThinFilmDesign to_stack(const json& p) {
  ThinFilmDesign d;
  for (const auto& l : p.at("layers")) {
    d.layers.push_back({l.at("material").get<std::string>(), l.at("thickness_nm").get<double>()});
  }
  return d;
}

class ThinFilmDomain final : public Domain {
 public:
  ThinFilmDomain() {
    shape_ = Shape::object({Shape::req(
        "layers",
        Shape::array(Shape::object({Shape::req("material", Shape::string(), "material identifier"),
                                    Shape::req("thickness_nm", Shape::number(), "physical thickness")})),
        "layers from the ambient side down to the substrate")});
  }

  std::string id() const override { return "thinfilm"; }
  std::string summary() const override {
    return "Design a multilayer optical coating on a glass substrate. Reflectance is unpolarized and "
           "computed over the task's wavelength band.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json&) const override {
    auto m = [](const char* n) {
      MetricInfo i{n, TargetKind::Exact, 0.005, true};
      i.ceiling = 1.0;
      return i;
    };
    return {m("reflectance_probe"), m("band_avg_reflectance"), m("band_max_reflectance"),
            m("band_min_reflectance")};
  }

  json make_context(Level level, CounterRng& rng) const override {
    std::vector<double> grid(kBandPoints);
    for (int i = 0; i < kBandPoints; ++i) grid[i] = kBandLo + (kBandHi - kBandLo) * i / (kBandPoints - 1);
    const double probe = grid[static_cast<std::size_t>(rng.integer(3, kBandPoints - 4))];
    const std::vector<std::vector<std::string>> materials{
        {"MgF2", "TiO2"},
        {"MgF2", "SiO2", "Ta2O5", "TiO2"},
        {"MgF2", "SiO2", "Al2O3", "HfO2", "Ta2O5", "TiO2"},
        {"MgF2", "CaF2", "SiO2", "Al2O3", "HfO2", "Si3N4", "ZrO2", "Ta2O5", "Nb2O5", "TiO2"}};
    return {{"ambient_index", 1.0},
            {"substrate_index", 1.52},
            {"incidence_deg", by_level<double>(level, {0.0, 0.0, 15.0, 30.0})},
            {"wavelengths_nm", grid},
            {"band_nm", {kBandLo, kBandHi}},
            {"probe_nm", probe},
            {"materials", materials[static_cast<std::size_t>(static_cast<int>(level) - 1)]},
            {"max_layers", by_level<int>(level, {2, 4, 6, 8})}};
  }

  std::vector<Constraint> make_constraints(Level level, const json& ctx) const override {
    const auto lo = by_level<double>(level, {20.0, 10.0, 5.0, 1.0});
    const auto hi = by_level<double>(level, {300.0, 400.0, 600.0, 800.0});
    return {count_constraint("layers", ctx.at("max_layers").get<long long>()),
            enum_constraint("layers[].material", ctx.at("materials")),
            range_constraint("layers[].thickness_nm", lo, hi)};
  }

  bool bind_generator(json&, Level, const Design& d, CounterRng&) const override {
    return !d.params.at("layers").empty();
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    const long long max_layers = max_count_of(goal.constraints, "layers").value_or(0);
    const auto mats = choices_of(goal.constraints, "layers[].material");
    const auto th = range_of(goal.constraints, "layers[].thickness_nm");
    std::vector<Coordinate> c{int_coord("n_layers", 0, max_layers)};
    for (long long s = 0; s < max_layers; ++s) {
      const std::string p = "layer" + std::to_string(s) + ".";
      c.push_back(cat_coord(p + "material", mats));
      c.push_back(real_coord(p + "thickness_nm", th.first, th.second));
    }
    return c;
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    json layers = json::array();
    for (long long s = 0; s < as_int(x[0]); ++s) {
      const std::size_t b = 1 + 2 * static_cast<std::size_t>(s);
      layers.push_back({{"material", pick(coords[b], x[b])}, {"thickness_nm", x[b + 1]}});
    }
    return {id(), {{"layers", layers}}};
  }

  Point encode(const Goal& goal, const Design& design) const override {
    const auto coords = coordinates(goal);
    Point x(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) x[i] = midpoint(coords[i]);
    const auto& layers = design.params.at("layers");
    const std::size_t slots = (coords.size() - 1) / 2;
    const std::size_t n = std::min(layers.size(), slots);
    x[0] = static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      x[1 + 2 * s] = index_in(coords[1 + 2 * s], layers[s].at("material"));
      x[2 + 2 * s] = layers[s].at("thickness_nm").get<double>();
    }
    return clamp_point(coords, x);
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto& ctx = goal.context;
    ThinFilmConfig cfg;
    cfg.ambient_index = ctx.at("ambient_index").get<double>();
    cfg.substrate_index = ctx.at("substrate_index").get<double>();
    cfg.incidence_deg = ctx.at("incidence_deg").get<double>();
    cfg.wavelengths_nm = ctx.at("wavelengths_nm").get<std::vector<double>>();
    const auto spec = simulate_thinfilm(to_stack(design.params), cfg);
    const double probe = ctx.at("probe_nm").get<double>();
    std::size_t pi = 0;
    for (std::size_t i = 0; i < cfg.wavelengths_nm.size(); ++i) {
      if (std::abs(cfg.wavelengths_nm[i] - probe) < std::abs(cfg.wavelengths_nm[pi] - probe)) pi = i;
    }
    const auto& r = spec.reflectance;
    Outcome o{id(), {}};
    o.metrics["reflectance_probe"] = r[pi];
    o.metrics["band_avg_reflectance"] = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    o.metrics["band_max_reflectance"] = *std::max_element(r.begin(), r.end());
    o.metrics["band_min_reflectance"] = *std::min_element(r.begin(), r.end());
    return o;
  }

  double parsimony(const Goal& goal, const Design& design) const override {
    const double max_layers = goal.context.value("max_layers", 1);
    return 1.0 - std::min(1.0, static_cast<double>(design.params.at("layers").size()) / max_layers);
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_thinfilm_domain() { return std::make_unique<ThinFilmDomain>(); }

}  // namespace invdes::detail
