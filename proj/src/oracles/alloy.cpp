#include "invdes/oracles/alloy.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "invdes/data.hpp"
#include "invdes/model.hpp"

namespace invdes::oracles {

namespace {
constexpr double kProcessingScale = 0.4;
}

const AlloyTable& alloy_table() {
  static const AlloyTable table = [] {
    AlloyTable t;
    const auto& doc = data::bundled_json("alloy_elements_v1.json");
    for (auto it = doc.at("elements").begin(); it != doc.at("elements").end(); ++it) {
      const auto& e = it.value();
      t.elements[it.key()] = {e.at("density_g_cc").get<double>(), e.at("melting_K").get<double>(),
                              e.at("strength_MPa").get<double>(), e.at("ss_coeff_MPa").get<double>(),
                              e.at("cost_per_kg").get<double>()};
    }
    t.melting_depression_fraction = doc.at("melting_depression_fraction").get<double>();
    return t;
  }();
  return table;
}

AlloyOutcome evaluate_alloy(const AlloyDesign& d, const AlloyTable& table) {
  if (d.composition.empty()) throw ValidationError("composition is empty");
  if (!(d.processing_temp_K > 0.0)) throw ValidationError("processing_temp_K must be positive");
  double sum = 0.0;
  for (const auto& [el, x] : d.composition) {
    if (!table.elements.count(el)) throw ValidationError("unknown element '" + el + "'");
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("fraction of " + el + " is negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kCompositionSumTolerance) {
    throw ValidationError("composition fractions must sum to 1");
  }

  AlloyOutcome out;
  double best = -1.0;
  double rom_melt = 0.0, rom_strength = 0.0;
  for (const auto& [el, x] : d.composition) {
    const auto& p = table.elements.at(el);
    out.density_g_cc += x * p.density_g_cc;
    out.cost_per_kg += x * p.cost_per_kg;
    rom_melt += x * p.melting_K;
    rom_strength += x * p.strength_MPa;
    if (x > best) {
      best = x;
      out.base_element = el;
    }
  }

  double depression = 0.0;
  for (auto i = d.composition.begin(); i != d.composition.end(); ++i) {
    for (auto j = std::next(i); j != d.composition.end(); ++j) {
      const double tm = std::min(table.elements.at(i->first).melting_K,
                                 table.elements.at(j->first).melting_K);
      depression += 2.0 * i->second * j->second * tm;
    }
  }
  out.melting_point_K = rom_melt - table.melting_depression_fraction * depression;

  double solid_solution = 0.0;
  for (const auto& [el, x] : d.composition) {
    if (el != out.base_element) solid_solution += table.elements.at(el).ss_coeff_MPa * std::sqrt(x);
  }
  const double factor = 1.0 - std::exp(-d.processing_temp_K / (kProcessingScale * out.melting_point_K));
  out.yield_strength_MPa = rom_strength + factor * solid_solution;
  return out;
}

}  // namespace invdes::oracles
