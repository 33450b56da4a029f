#include <algorithm>

#include "common.hpp"
#include "invdes/oracles/perturbation.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

constexpr double kMinMarkerEffect = 0.3;
const std::string kMetricPrefix = "log2fc_";

class PerturbationDomain final : public Domain {
 public:
  PerturbationDomain() {
    shape_ = Shape::object({Shape::req("gene", Shape::string(), "gene to knock out")});
  }

  std::string id() const override { return "perturbation"; }
  std::string summary() const override {
    return "Pick a single-gene knockout in a fixed regulatory network. Each metric is the log2 fold-change "
           "of a marker gene relative to the unperturbed state.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json& ctx) const override {
    std::vector<MetricInfo> out;
    if (!ctx.contains("markers")) return out;
    for (const auto& m : ctx.at("markers")) out.push_back({kMetricPrefix + m.get<std::string>(), TargetKind::Exact, 0.1, true});
    return out;
  }

  json make_context(Level level, CounterRng&) const override {
    return {{"n_markers", by_level<int>(level, {1, 2, 3, 5})}};
  }

  std::vector<Constraint> make_constraints(Level, const json&) const override {
    return {enum_constraint("gene", grn_model().genes)};
  }

  bool bind_generator(json& ctx, Level, const Design& design, CounterRng& rng) const override {
    const auto& model = grn_model();
    const auto ko = model.index_of(design.params.at("gene").get<std::string>());
    const auto delta = knockout_fixed_point(model, ko);
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < model.genes.size(); ++i) {
      if (i != ko && std::abs(delta[i]) > kMinMarkerEffect) pool.push_back(model.genes[i]);
    }
    const auto n = ctx.at("n_markers").get<std::size_t>();
    if (pool.size() < n) return false;
    // Partial Fisher-Yates; markers keep panel order afterwards.
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.integer(0, static_cast<long long>(pool.size() - i) - 1));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    std::sort(pool.begin(), pool.end(),
              [&](const auto& a, const auto& b) { return model.index_of(a) < model.index_of(b); });
    ctx["markers"] = pool;
    return true;
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    return {cat_coord("gene", choices_of(goal.constraints, "gene"))};
  }

  Design decode(const Goal& goal, const Point& x) const override {
    const auto coords = coordinates(goal);
    return {id(), {{"gene", pick(coords[0], clamp_point(coords, x)[0])}}};
  }

  Point encode(const Goal& goal, const Design& d) const override {
    const auto coords = coordinates(goal);
    return {d.params.contains("gene") ? index_in(coords[0], d.params.at("gene")) : 0.0};
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto& model = grn_model();
    const auto gene = design.params.at("gene").get<std::string>();
    if (!model.has_gene(gene)) throw ValidationError("unknown gene '" + gene + "'");
    const auto markers = goal.context.value("markers", std::vector<std::string>{});
    Outcome o{id(), {}};
    for (const auto& [m, v] : simulate_knockout({gene}, model, markers, goal.seed)) o.metrics[kMetricPrefix + m] = v;
    return o;
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_perturbation_domain() { return std::make_unique<PerturbationDomain>(); }

}  // namespace invdes::detail
