#include "invdes/oracles/thinfilm.hpp"

#include <algorithm>
#include <cmath>

#include "invdes/data.hpp"
#include "invdes/model.hpp"

namespace invdes::oracles {

namespace {

using cplx = std::complex<double>;

struct Admittances {
  cplx s;
  cplx p;
};

// Tilted admittances for a medium with index n where the ambient carries
// n0*sin(theta0) as the invariant tangential component.
Admittances admittances(cplx n, cplx cos_theta) { return {n * cos_theta, n / cos_theta}; }

cplx cos_in_medium(cplx n, cplx n0_sin0) {
  const cplx sin_t = n0_sin0 / n;
  cplx c = std::sqrt(1.0 - sin_t * sin_t);
  // Decaying branch for evanescent or absorbing media.
  if (c.imag() < 0.0) c = -c;
  return c;
}

// Reflectance and transmittance of one polarization for a stack described by
// per-layer phase thickness and admittance.
std::pair<double, double> solve_polarization(const std::vector<cplx>& deltas,
                                             const std::vector<cplx>& etas, cplx eta0,
                                             cplx eta_sub) {
  // Characteristic matrix product [[m00, m01], [m10, m11]].
  cplx m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  const cplx i{0.0, 1.0};
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const cplx c = std::cos(deltas[k]);
    const cplx s = std::sin(deltas[k]);
    const cplx a00 = c, a01 = i * s / etas[k], a10 = i * etas[k] * s, a11 = c;
    const cplx n00 = m00 * a00 + m01 * a10;
    const cplx n01 = m00 * a01 + m01 * a11;
    const cplx n10 = m10 * a00 + m11 * a10;
    const cplx n11 = m10 * a01 + m11 * a11;
    m00 = n00; m01 = n01; m10 = n10; m11 = n11;
  }
  const cplx b = m00 + m01 * eta_sub;
  const cplx c = m10 + m11 * eta_sub;
  const cplx denom = eta0 * b + c;
  const cplx r = (eta0 * b - c) / denom;
  const double reflect = std::norm(r);
  const double transmit = 4.0 * eta0.real() * eta_sub.real() / std::norm(denom);
  return {std::clamp(reflect, 0.0, 1.0), std::clamp(transmit, 0.0, 1.0)};
}

}  // namespace

const MaterialTable& material_table() {
  static const MaterialTable table = [] {
    MaterialTable t;
    const auto& doc = data::bundled_json("thinfilm_materials_v1.json");
    for (auto it = doc.at("materials").begin(); it != doc.at("materials").end(); ++it) {
      t[it.key()] = {it.value().at(0).get<double>(), it.value().at(1).get<double>()};
    }
    return t;
  }();
  return table;
}

Spectrum simulate_thinfilm(const ThinFilmDesign& design, const ThinFilmConfig& config,
                           const MaterialTable& materials) {
  if (config.wavelengths_nm.empty()) throw ValidationError("wavelength grid is empty");
  for (std::size_t k = 1; k < config.wavelengths_nm.size(); ++k) {
    if (!(config.wavelengths_nm[k] > config.wavelengths_nm[k - 1])) {
      throw ValidationError("wavelength grid must be strictly increasing");
    }
  }
  if (config.wavelengths_nm.front() <= 0.0) throw ValidationError("wavelengths must be positive");
  if (design.layers.size() > kMaxFilmLayers) throw ValidationError("too many layers");

  std::vector<cplx> indices;
  indices.reserve(design.layers.size());
  for (const auto& layer : design.layers) {
    auto it = materials.find(layer.material);
    if (it == materials.end()) throw ValidationError("unknown material '" + layer.material + "'");
    if (!(layer.thickness_nm >= kMinThicknessNm && layer.thickness_nm <= kMaxThicknessNm)) {
      throw ValidationError("layer thickness out of range");
    }
    indices.push_back(it->second);
  }

  const double theta0 = config.incidence_deg * M_PI / 180.0;
  const cplx n0 = config.ambient_index;
  const cplx n0_sin0 = n0 * std::sin(theta0);
  const cplx cos0 = cos_in_medium(n0, n0_sin0);
  const auto eta0 = admittances(n0, cos0);
  const auto eta_sub = admittances(config.substrate_index,
                                   cos_in_medium(config.substrate_index, n0_sin0));

  std::vector<cplx> cos_layers(indices.size());
  std::vector<cplx> eta_s(indices.size()), eta_p(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    cos_layers[k] = cos_in_medium(indices[k], n0_sin0);
    const auto eta = admittances(indices[k], cos_layers[k]);
    eta_s[k] = eta.s;
    eta_p[k] = eta.p;
  }

  Spectrum out;
  out.wavelengths_nm = config.wavelengths_nm;
  std::vector<cplx> deltas(indices.size());
  for (double lambda : config.wavelengths_nm) {
    for (std::size_t k = 0; k < indices.size(); ++k) {
      deltas[k] = 2.0 * M_PI * indices[k] * design.layers[k].thickness_nm * cos_layers[k] / lambda;
    }
    const auto [rs, ts] = solve_polarization(deltas, eta_s, eta0.s, eta_sub.s);
    const auto [rp, tp] = solve_polarization(deltas, eta_p, eta0.p, eta_sub.p);
    out.reflectance.push_back(0.5 * (rs + rp));
    out.transmittance.push_back(0.5 * (ts + tp));
  }
  return out;
}

}  // namespace invdes::oracles
