#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "invdes/oracles/quantum.hpp"

namespace invdes::detail {

namespace {

using namespace invdes::oracles;

const std::vector<std::string> kSingleQubitGates{"H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ"};
const std::vector<std::string> kAllGates{"H", "X", "Y", "Z", "S", "T", "CNOT", "CZ", "SWAP", "RX", "RY", "RZ"};

QuantumCircuitDesign to_circuit(const json& p) {
  QuantumCircuitDesign c;
  c.n_qubits = p.at("n_qubits").get<int>();
  for (const auto& g : p.at("gates")) {
    Gate gate;
    auto name = gate_from_string(g.at("name").get<std::string>());
    if (!name) throw ValidationError("unknown gate '" + g.at("name").get<std::string>() + "'");
    gate.name = *name;
    for (const auto& q : g.at("qubits")) gate.qubits.push_back(static_cast<int>(std::llround(q.get<double>())));
    if (g.contains("angle")) gate.angle = g.at("angle").get<double>();
    c.gates.push_back(std::move(gate));
  }
  return c;
}

std::vector<cplx> target_of(const json& context) {
  std::vector<cplx> out;
  for (const auto& a : context.at("target_state")) out.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  return out;
}

class QuantumDomain final : public Domain {
 public:
  QuantumDomain() {
    shape_ = Shape::object(
        {Shape::req("n_qubits", Shape::integer(), "number of qubits, must equal the task's register size"),
         Shape::req("gates",
                    Shape::array(Shape::object(
                        {Shape::req("name", Shape::string(), "gate name"),
                         Shape::req("qubits", Shape::array(Shape::integer()),
                                    "qubit indices; two-qubit gates list control then target"),
                         Shape::opt("angle", Shape::number(), "radians, only for RX/RY/RZ")})),
                    "gates applied in order to |0...0>")});
  }

  std::string id() const override { return "quantum"; }
  std::string summary() const override {
    return "Design a quantum circuit acting on |0...0>. Basis index bit q is qubit q; entanglement "
           "entropy is measured between the first ceil(n/2) qubits and the rest.";
  }
  const Shape& shape() const override { return shape_; }

  std::vector<MetricInfo> metrics(const json& context) const override {
    const int n = context.value("n_qubits", 1);
    MetricInfo fid{"fidelity", TargetKind::MinBound, 0.0, true};
    fid.ceiling = 1.0;
    MetricInfo ground{"prob_ground", TargetKind::Exact, 0.02, true, 1.0};
    MetricInfo pmax{"prob_max", TargetKind::Exact, 0.0, true, 1.0};
    return {fid, {"entanglement_entropy", TargetKind::Exact, 0.05, n > 1}, ground, pmax};
  }

  json make_context(Level level, CounterRng&) const override {
    return {{"n_qubits", by_level<int>(level, {1, 2, 3, 4})},
            {"max_gates", by_level<int>(level, {3, 5, 6, 8})}};
  }

  std::vector<Constraint> make_constraints(Level, const json& ctx) const override {
    const int n = ctx.at("n_qubits").get<int>();
    return {enum_constraint("n_qubits", json::array({n})),
            count_constraint("gates", ctx.at("max_gates").get<long long>()),
            enum_constraint("gates[].name", n == 1 ? json(kSingleQubitGates) : json(kAllGates)),
            range_constraint("gates[].qubits[]", 0, n - 1),
            range_constraint("gates[].angle", -M_PI, M_PI)};
  }

  bool bind_generator(json& ctx, Level, const Design& design, CounterRng&) const override {
    const auto circuit = to_circuit(design.params);
    if (circuit.gates.empty()) return false;
    json target = json::array();
    for (const auto& a : run_circuit(circuit)) target.push_back({a.real(), a.imag()});
    ctx["target_state"] = target;
    return true;
  }

  std::vector<Coordinate> coordinates(const Goal& goal) const override {
    const int n = goal.context.at("n_qubits").get<int>();
    const long long max_gates = max_count_of(goal.constraints, "gates").value_or(0);
    const auto names = choices_of(goal.constraints, "gates[].name");
    const auto angle = range_of(goal.constraints, "gates[].angle");
    std::vector<Coordinate> c{int_coord("length", 0, max_gates)};
    for (long long s = 0; s < max_gates; ++s) {
      const std::string p = "g" + std::to_string(s) + ".";
      c.push_back(cat_coord(p + "name", names));
      c.push_back(int_coord(p + "q0", 0, n - 1));
      c.push_back(int_coord(p + "q1_offset", 1, std::max(1, n - 1)));
      c.push_back(real_coord(p + "angle", angle.first, angle.second));
    }
    return c;
  }

  Design decode(const Goal& goal, const Point& x_in) const override {
    const auto coords = coordinates(goal);
    const Point x = clamp_point(coords, x_in);
    const int n = goal.context.at("n_qubits").get<int>();
    json gates = json::array();
    const auto length = as_int(x[0]);
    for (long long s = 0; s < length; ++s) {
      const std::size_t b = 1 + 4 * static_cast<std::size_t>(s);
      const std::string name = pick(coords[b], x[b]).get<std::string>();
      const auto g = *gate_from_string(name);
      const auto q0 = as_int(x[b + 1]);
      json gate = {{"name", name}};
      if (gate_arity(g) == 2) {
        if (n < 2) continue;
        gate["qubits"] = {q0, (q0 + as_int(x[b + 2])) % n};
      } else {
        gate["qubits"] = {q0};
      }
      if (gate_takes_angle(g)) gate["angle"] = x[b + 3];
      gates.push_back(gate);
    }
    return {id(), {{"n_qubits", n}, {"gates", gates}}};
  }

  Point encode(const Goal& goal, const Design& design) const override {
    const auto coords = coordinates(goal);
    Point x(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) x[i] = midpoint(coords[i]);
    const int n = goal.context.at("n_qubits").get<int>();
    const auto& gates = design.params.at("gates");
    const std::size_t slots = (coords.size() - 1) / 4;
    x[0] = static_cast<double>(std::min(gates.size(), slots));
    for (std::size_t s = 0; s < std::min(gates.size(), slots); ++s) {
      const auto& g = gates[s];
      const std::size_t b = 1 + 4 * s;
      x[b] = index_in(coords[b], g.at("name"));
      const auto& q = g.at("qubits");
      if (!q.empty()) x[b + 1] = q[0].get<double>();
      if (q.size() > 1 && n > 1) {
        x[b + 2] = static_cast<double>(((q[1].get<long long>() - q[0].get<long long>()) % n + n) % n);
      }
      if (g.contains("angle")) x[b + 3] = g.at("angle").get<double>();
    }
    return clamp_point(coords, x);
  }

  std::vector<std::string> invariant_errors(const Goal& goal, const json& params) const override {
    std::vector<std::string> errs;
    QuantumCircuitDesign c;
    try {
      c = to_circuit(params);
    } catch (const ValidationError& e) {
      return {e.what()};
    }
    for (auto& e : circuit_errors(c)) errs.push_back(std::move(e));
    const int n = goal.context.value("n_qubits", c.n_qubits);
    if (c.n_qubits != n) errs.push_back("n_qubits must equal " + std::to_string(n));
    return errs;
  }

  Outcome simulate(const Goal& goal, const Design& design) const override {
    const auto circuit = to_circuit(design.params);
    const auto target = target_of(goal.context);
    if (target.size() != (std::size_t{1} << circuit.n_qubits)) {
      throw ValidationError("n_qubits does not match the target state");
    }
    const auto r = simulate_quantum(circuit, target);
    Outcome o{id(), {}};
    o.metrics["fidelity"] = r.fidelity;
    o.metrics["entanglement_entropy"] = r.entanglement_entropy;
    o.metrics["prob_ground"] = r.probabilities.front();
    o.metrics["prob_max"] = *std::max_element(r.probabilities.begin(), r.probabilities.end());
    return o;
  }

  double parsimony(const Goal& goal, const Design& design) const override {
    const double max_gates = goal.context.value("max_gates", 1);
    return 1.0 - std::min(1.0, static_cast<double>(design.params.at("gates").size()) / max_gates);
  }

 private:
  Shape shape_;
};

}  // namespace

std::unique_ptr<Domain> make_quantum_domain() { return std::make_unique<QuantumDomain>(); }

}  // namespace invdes::detail
