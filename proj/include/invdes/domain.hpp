#pragma once

// A domain adapts one oracle to the benchmark: it owns the design schema,
// per-task configuration ("context"), the constraint box for each level, the
// flat parameterization used by samplers and optimizers, and the mapping from
// raw oracle output to named metrics.

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "invdes/model.hpp"
#include "invdes/rng.hpp"
#include "invdes/shape.hpp"

namespace invdes {

struct MetricInfo {
  std::string name;
  TargetKind preferred = TargetKind::Exact;
  // Exact targets whose magnitude falls below the floor are emitted as a
  // max_bound at the floor (relative error is meaningless near zero).
  double floor = 0.0;
  bool selectable = true;  // false: reported but never used as a target
  // Targets are clipped here (a probability target never exceeds 1).
  double ceiling = std::numeric_limits<double>::infinity();
};

enum class CoordType { Real, Integer, Categorical };

/// One coordinate of the flat design vector. Categorical coordinates hold an
/// index into `choices`; integer coordinates hold an integral double.
struct Coordinate {
  std::string name;
  CoordType type = CoordType::Real;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<json> choices;
  bool log_scale = false;

  double span() const { return hi - lo; }
  std::size_t n_choices() const { return choices.size(); }
};

using Point = std::vector<double>;

class Domain {
 public:
  virtual ~Domain() = default;

  virtual std::string id() const = 0;
  virtual std::string summary() const = 0;
  virtual const Shape& shape() const = 0;

  virtual std::vector<MetricInfo> metrics(const json& context) const = 0;

  /// Per-task system configuration for a level.
  virtual json make_context(Level level, CounterRng& rng) const = 0;
  virtual std::vector<Constraint> make_constraints(Level level, const json& context) const = 0;

  /// Completes the context once the generating design is known (e.g. the
  /// quantum target state, the perturbation marker panel). Returns false
  /// when the design cannot anchor a task and must be resampled.
  virtual bool bind_generator(json& context, Level level, const Design& design,
                              CounterRng& rng) const;

  /// Rejects generating outcomes that make poor targets (unstable loops...).
  virtual bool usable_outcome(const Goal& goal, const Outcome& outcome) const;

  virtual std::vector<Coordinate> coordinates(const Goal& goal) const = 0;
  virtual Design decode(const Goal& goal, const Point& x) const = 0;
  /// Best-effort inverse of decode; coordinates that do not apply take
  /// their midpoint.
  virtual Point encode(const Goal& goal, const Design& design) const = 0;

  /// Domain invariants beyond shape and constraints (ordering, distinctness).
  virtual std::vector<std::string> invariant_errors(const Goal& goal, const json& params) const;

  /// Runs the oracle. Throws ValidationError for designs the oracle rejects.
  virtual Outcome simulate(const Goal& goal, const Design& design) const = 0;

  /// Simplicity score in [0, 1]; 1 is the simplest design.
  virtual double parsimony(const Goal& goal, const Design& design) const;
};

/// Registered domains in canonical order.
const std::vector<std::string>& domain_ids();
const Domain& get_domain(const std::string& id);  // throws ContractError
bool has_domain(const std::string& id);

/// Type errors plus unknown keys (the parse-stage check).
std::vector<std::string> shape_errors(const Domain& domain, const json& params);

/// Constraint and invariant violations; assumes shape_errors is empty.
std::vector<std::string> validation_errors(const Domain& domain, const Goal& goal, const json& params);

/// Shape, constraint and invariant errors in one list.
std::vector<std::string> design_errors(const Domain& domain, const Goal& goal, const json& params);

/// Runs the oracle and bumps the process-wide call counter.
Outcome run_oracle(const Domain& domain, const Goal& goal, const Design& design);
std::uint64_t oracle_call_count();

/// Clamps and snaps a point into the coordinate box.
Point clamp_point(const std::vector<Coordinate>& coords, Point x);

/// Uniform sample over the coordinate box (log-uniform where flagged).
Point sample_point(const std::vector<Coordinate>& coords, CounterRng& rng);

/// Coordinate value as a fraction of its range (log space where flagged).
double to_unit(const Coordinate& c, double x);
/// Inverse of to_unit; u is clamped to [0, 1].
double from_unit(const Coordinate& c, double u);

/// Maps a point of the unit cube into the box. Discrete coordinates split
/// [0, 1] into equal bins, one per admissible value.
Point point_from_unit(const std::vector<Coordinate>& coords, const std::vector<double>& u);

/// Selectable metrics of a context, in declaration order.
std::vector<MetricInfo> selectable_metrics(const Domain& domain, const json& context);

}  // namespace invdes
