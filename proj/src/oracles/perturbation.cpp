#include "invdes/oracles/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "invdes/data.hpp"
#include "invdes/model.hpp"
#include "invdes/rng.hpp"

namespace invdes::oracles {

namespace {
constexpr int kMaxIterations = 10000;
constexpr double kConvergence = 1e-15;
}  // namespace

std::size_t GrnModel::index_of(const std::string& gene) const {
  auto it = std::find(genes.begin(), genes.end(), gene);
  if (it == genes.end()) throw ValidationError("unknown gene '" + gene + "'");
  return static_cast<std::size_t>(it - genes.begin());
}

bool GrnModel::has_gene(const std::string& gene) const {
  return std::find(genes.begin(), genes.end(), gene) != genes.end();
}

std::vector<double> GrnModel::dense_weights() const {
  const std::size_t n = genes.size();
  std::vector<double> w(n * n, 0.0);
  for (const auto& e : edges) w[index_of(e.target) * n + index_of(e.source)] += e.weight;
  return w;
}

const GrnModel& grn_model() {
  static const GrnModel model = [] {
    GrnModel m;
    const auto& doc = data::bundled_json("grn_v1.json");
    m.genes = doc.at("genes").get<std::vector<std::string>>();
    for (auto it = doc.at("pathways").begin(); it != doc.at("pathways").end(); ++it) {
      m.pathways[it.key()] = it.value().get<std::vector<std::string>>();
    }
    for (const auto& e : doc.at("edges")) {
      m.edges.push_back({e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                         e.at("weight").get<double>()});
    }
    m.noise_scale = doc.at("noise_scale").get<double>();
    m.knockout_log2_floor = doc.at("knockout_log2_floor").get<double>();
    return m;
  }();
  return model;
}

std::vector<double> knockout_fixed_point(const GrnModel& model, std::size_t ko) {
  const std::size_t n = model.genes.size();
  if (ko >= n) throw ValidationError("knockout index out of range");
  const auto w = model.dense_weights();
  std::vector<double> d(n, 0.0), next(n, 0.0);
  d[ko] = model.knockout_log2_floor;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == ko) {
        next[i] = model.knockout_log2_floor;
        continue;
      }
      double s = 0.0;
      const double* row = &w[i * n];
      for (std::size_t j = 0; j < n; ++j) s += row[j] * d[j];
      next[i] = s;
      change = std::max(change, std::abs(s - d[i]));
    }
    d.swap(next);
    if (change <= kConvergence) break;
  }
  return d;
}

std::map<std::string, double> simulate_knockout(const KnockoutDesign& design, const GrnModel& model,
                                                const std::vector<std::string>& markers,
                                                std::uint64_t seed, double noise_scale) {
  const std::size_t ko = model.index_of(design.gene);
  for (const auto& m : markers) model.index_of(m);
  const double scale = noise_scale < 0.0 ? model.noise_scale : noise_scale;
  const auto fold = knockout_fixed_point(model, ko);
  std::map<std::string, double> out;
  for (const auto& m : markers) {
    const std::size_t i = model.index_of(m);
    double v = fold[i];
    if (i != ko && scale > 0.0) {
      CounterRng rng{seed, hash_string(m)};
      v += rng.uniform(-scale, scale);
    }
    out[m] = v;
  }
  return out;
}

}  // namespace invdes::oracles
