#include "invdes/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace invdes {

namespace {

constexpr double kRangeSlack = 1e-9;

std::vector<std::string> split(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string child(const std::string& loc, const std::string& key) {
  return loc.empty() ? key : loc + "." + key;
}

std::string render(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

}  // namespace

std::vector<std::pair<std::string, json>> resolve_path(const json& params, const std::string& path) {
  std::vector<std::pair<std::string, json>> frontier{{"", params}};
  for (const auto& seg : split(path)) {
    std::vector<std::pair<std::string, json>> next;
    for (const auto& [loc, node] : frontier) {
      if (seg == "*") {
        if (!node.is_object()) continue;
        for (auto it = node.begin(); it != node.end(); ++it) next.emplace_back(child(loc, it.key()), it.value());
      } else if (seg == "@keys") {
        if (!node.is_object()) continue;
        for (auto it = node.begin(); it != node.end(); ++it) next.emplace_back(child(loc, it.key()), it.key());
      } else if (seg.size() > 2 && seg.compare(seg.size() - 2, 2, "[]") == 0) {
        const std::string key = seg.substr(0, seg.size() - 2);
        if (!node.is_object() || !node.contains(key) || !node.at(key).is_array()) continue;
        const auto& arr = node.at(key);
        for (std::size_t i = 0; i < arr.size(); ++i) {
          next.emplace_back(child(loc, key) + "[" + std::to_string(i) + "]", arr[i]);
        }
      } else {
        if (!node.is_object() || !node.contains(seg)) continue;
        next.emplace_back(child(loc, seg), node.at(seg));
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

std::vector<std::string> constraint_violations(const json& params,
                                               const std::vector<Constraint>& constraints) {
  std::vector<std::string> out;
  for (const auto& c : constraints) {
    const std::string tag = "[" + to_string(c.bound_kind) + "] ";
    const auto values = resolve_path(params, c.parameter_path);
    switch (c.bound_kind) {
      case BoundKind::Range: {
        const double lo = c.bound_value.at(0).get<double>();
        const double hi = c.bound_value.at(1).get<double>();
        const double slack = kRangeSlack * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
        for (const auto& [loc, v] : values) {
          if (!v.is_number()) {
            out.push_back(tag + loc + ": expected a number");
            continue;
          }
          const double x = v.get<double>();
          if (!(x >= lo - slack && x <= hi + slack)) {
            out.push_back(tag + loc + ": " + render(v) + " outside [" + render(c.bound_value.at(0)) +
                          ", " + render(c.bound_value.at(1)) + "]");
          }
        }
        break;
      }
      case BoundKind::EnumMember:
        for (const auto& [loc, v] : values) {
          bool found = false;
          for (const auto& choice : c.bound_value) {
            if (choice == v || (choice.is_number() && v.is_number() &&
                                choice.get<double>() == v.get<double>())) {
              found = true;
            }
          }
          if (!found) out.push_back(tag + loc + ": " + render(v) + " is not one of " + c.bound_value.dump());
        }
        break;
      case BoundKind::SumToOne: {
        const double tol = c.bound_value.get<double>();
        for (const auto& [loc, v] : values) {
          if (!v.is_object() && !v.is_array()) continue;
          double sum = 0.0;
          for (const auto& x : v) {
            if (x.is_number()) sum += x.get<double>();
          }
          if (!(std::abs(sum - 1.0) <= tol)) {
            std::ostringstream os;
            os.precision(9);
            os << tag << (loc.empty() ? c.parameter_path : loc) << ": fractions sum to " << sum
               << ", expected 1 within " << tol;
            out.push_back(os.str());
          }
        }
        break;
      }
      case BoundKind::MaxCount: {
        const auto limit = c.bound_value.get<long long>();
        for (const auto& [loc, v] : values) {
          if ((v.is_array() || v.is_object()) && static_cast<long long>(v.size()) > limit) {
            out.push_back(tag + loc + ": " + std::to_string(v.size()) + " entries, at most " +
                          std::to_string(limit) + " allowed");
          }
        }
        break;
      }
    }
  }
  return out;
}

const Constraint* find_constraint(const std::vector<Constraint>& constraints, const std::string& path,
                                  BoundKind kind) {
  for (const auto& c : constraints) {
    if (c.parameter_path == path && c.bound_kind == kind) return &c;
  }
  return nullptr;
}

std::pair<double, double> range_of(const std::vector<Constraint>& constraints, const std::string& path) {
  const auto* c = find_constraint(constraints, path, BoundKind::Range);
  if (!c) throw ContractError("goal has no range constraint for '" + path + "'");
  return {c->bound_value.at(0).get<double>(), c->bound_value.at(1).get<double>()};
}

std::vector<json> choices_of(const std::vector<Constraint>& constraints, const std::string& path) {
  const auto* c = find_constraint(constraints, path, BoundKind::EnumMember);
  if (!c) throw ContractError("goal has no enum constraint for '" + path + "'");
  return c->bound_value.get<std::vector<json>>();
}

std::optional<long long> max_count_of(const std::vector<Constraint>& constraints,
                                      const std::string& path) {
  const auto* c = find_constraint(constraints, path, BoundKind::MaxCount);
  if (!c) return std::nullopt;
  return c->bound_value.get<long long>();
}

}  // namespace invdes
