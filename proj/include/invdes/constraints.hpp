#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invdes/model.hpp"

namespace invdes {

/// Values addressed by a constraint path, paired with a concrete location
/// such as `gates[3].angle`. Segments: `name`, `name[]` (every element),
/// `*` (every object value) and `@keys` (every object key, as strings).
/// Missing keys contribute nothing.
std::vector<std::pair<std::string, json>> resolve_path(const json& params, const std::string& path);

/// All violations of the goal constraints, formatted `[kind] location: why`.
std::vector<std::string> constraint_violations(const json& params,
                                               const std::vector<Constraint>& constraints);

/// Lookup helpers for adapters that derive a search box from the constraints.
const Constraint* find_constraint(const std::vector<Constraint>& constraints,
                                  const std::string& path, BoundKind kind);
std::pair<double, double> range_of(const std::vector<Constraint>& constraints,
                                   const std::string& path);
std::vector<json> choices_of(const std::vector<Constraint>& constraints, const std::string& path);
std::optional<long long> max_count_of(const std::vector<Constraint>& constraints,
                                      const std::string& path);

}  // namespace invdes
