#pragma once

// Helpers shared by the domain adapters.

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "invdes/constraints.hpp"
#include "invdes/domain.hpp"

namespace invdes::detail {

inline Coordinate real_coord(std::string name, double lo, double hi, bool log_scale = false) {
  Coordinate c;
  c.name = std::move(name);
  c.type = CoordType::Real;
  c.lo = lo;
  c.hi = hi;
  c.log_scale = log_scale && lo > 0.0;
  return c;
}

inline Coordinate int_coord(std::string name, long long lo, long long hi) {
  Coordinate c;
  c.name = std::move(name);
  c.type = CoordType::Integer;
  c.lo = static_cast<double>(lo);
  c.hi = static_cast<double>(std::max(lo, hi));
  return c;
}

inline Coordinate cat_coord(std::string name, std::vector<json> choices) {
  Coordinate c;
  c.name = std::move(name);
  c.type = CoordType::Categorical;
  c.choices = std::move(choices);
  c.lo = 0.0;
  c.hi = c.choices.empty() ? 0.0 : static_cast<double>(c.choices.size() - 1);
  return c;
}

inline long long as_int(double x) { return std::llround(x); }

inline const json& pick(const Coordinate& c, double x) {
  const auto i = std::clamp<long long>(as_int(x), 0, static_cast<long long>(c.choices.size()) - 1);
  return c.choices[static_cast<std::size_t>(i)];
}

inline double midpoint(const Coordinate& c) {
  if (c.type == CoordType::Real) return c.log_scale ? std::sqrt(c.lo * c.hi) : 0.5 * (c.lo + c.hi);
  return std::floor(0.5 * (c.lo + c.hi));
}

/// Index of v among the choices, or the midpoint when absent.
inline double index_in(const Coordinate& c, const json& v) {
  for (std::size_t i = 0; i < c.choices.size(); ++i) {
    if (c.choices[i] == v ||
        (v.is_number() && c.choices[i].is_number() && v.get<double>() == c.choices[i].get<double>())) {
      return static_cast<double>(i);
    }
  }
  return midpoint(c);
}

inline double num_or(const json& obj, const char* key, double fallback) {
  if (obj.is_object() && obj.contains(key) && obj.at(key).is_number()) return obj.at(key).get<double>();
  return fallback;
}

inline Constraint range_constraint(std::string path, double lo, double hi) {
  return {std::move(path), BoundKind::Range, json::array({lo, hi})};
}

inline Constraint enum_constraint(std::string path, json choices) {
  return {std::move(path), BoundKind::EnumMember, std::move(choices)};
}

inline Constraint count_constraint(std::string path, long long n) {
  return {std::move(path), BoundKind::MaxCount, n};
}

inline Constraint sum_constraint(std::string path, double tol) {
  return {std::move(path), BoundKind::SumToOne, tol};
}

template <typename T>
T by_level(Level level, const std::array<T, 4>& values) {
  return values[static_cast<std::size_t>(static_cast<int>(level) - 1)];
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::unique_ptr<Domain> make_quantum_domain();
std::unique_ptr<Domain> make_thinfilm_domain();
std::unique_ptr<Domain> make_controls_domain();
std::unique_ptr<Domain> make_filter_domain();
std::unique_ptr<Domain> make_reactor_domain();
std::unique_ptr<Domain> make_heatx_domain();
std::unique_ptr<Domain> make_pkpd_domain();
std::unique_ptr<Domain> make_ssa_domain();
std::unique_ptr<Domain> make_alloy_domain();
std::unique_ptr<Domain> make_perturbation_domain();

}  // namespace invdes::detail
