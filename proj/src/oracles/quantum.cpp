#include "invdes/oracles/quantum.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "invdes/model.hpp"

namespace invdes::oracles {

namespace {

using Mat2 = std::array<cplx, 4>;  // row-major

constexpr double kInvSqrt2 = 0.70710678118654752440;

Mat2 single_qubit_matrix(const Gate& g) {
  const cplx i{0.0, 1.0};
  const double theta = g.angle.value_or(0.0);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (g.name) {
    case GateName::H: return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case GateName::X: return {0.0, 1.0, 1.0, 0.0};
    case GateName::Y: return {0.0, -i, i, 0.0};
    case GateName::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateName::S: return {1.0, 0.0, 0.0, i};
    case GateName::T: return {1.0, 0.0, 0.0, std::polar(1.0, M_PI / 4.0)};
    case GateName::RX: return {c, -i * s, -i * s, c};
    case GateName::RY: return {c, -s, s, c};
    case GateName::RZ: return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
    default: break;
  }
  throw ValidationError("not a single-qubit gate: " + to_string(g.name));
}

}  // namespace

std::optional<GateName> gate_from_string(const std::string& s) {
  static const std::array<std::pair<const char*, GateName>, 12> table{{
      {"H", GateName::H},       {"X", GateName::X},   {"Y", GateName::Y},
      {"Z", GateName::Z},       {"S", GateName::S},   {"T", GateName::T},
      {"CNOT", GateName::CNOT}, {"CZ", GateName::CZ}, {"SWAP", GateName::SWAP},
      {"RX", GateName::RX},     {"RY", GateName::RY}, {"RZ", GateName::RZ},
  }};
  for (const auto& [name, g] : table) {
    if (s == name) return g;
  }
  return std::nullopt;
}

std::string to_string(GateName g) {
  switch (g) {
    case GateName::H: return "H";
    case GateName::X: return "X";
    case GateName::Y: return "Y";
    case GateName::Z: return "Z";
    case GateName::S: return "S";
    case GateName::T: return "T";
    case GateName::CNOT: return "CNOT";
    case GateName::CZ: return "CZ";
    case GateName::SWAP: return "SWAP";
    case GateName::RX: return "RX";
    case GateName::RY: return "RY";
    case GateName::RZ: return "RZ";
  }
  return "?";
}

int gate_arity(GateName g) {
  return (g == GateName::CNOT || g == GateName::CZ || g == GateName::SWAP) ? 2 : 1;
}

bool gate_takes_angle(GateName g) {
  return g == GateName::RX || g == GateName::RY || g == GateName::RZ;
}

std::vector<std::string> circuit_errors(const QuantumCircuitDesign& design) {
  std::vector<std::string> errs;
  if (design.n_qubits < 1 || design.n_qubits > kMaxQubits) {
    errs.push_back("n_qubits must lie in [1, " + std::to_string(kMaxQubits) + "]");
    return errs;
  }
  if (design.gates.size() > kMaxGates) {
    errs.push_back("circuit has more than " + std::to_string(kMaxGates) + " gates");
  }
  for (std::size_t k = 0; k < design.gates.size(); ++k) {
    const auto& g = design.gates[k];
    const std::string where = "gate " + std::to_string(k) + " (" + to_string(g.name) + ")";
    if (static_cast<int>(g.qubits.size()) != gate_arity(g.name)) {
      errs.push_back(where + ": expects " + std::to_string(gate_arity(g.name)) + " qubit(s)");
      continue;
    }
    for (int q : g.qubits) {
      if (q < 0 || q >= design.n_qubits) {
        errs.push_back(where + ": qubit index " + std::to_string(q) + " out of range");
      }
    }
    if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1]) {
      errs.push_back(where + ": control and target must differ");
    }
    if (gate_takes_angle(g.name) != g.angle.has_value()) {
      errs.push_back(where + (gate_takes_angle(g.name) ? ": missing angle" : ": unexpected angle"));
    } else if (g.angle && !std::isfinite(*g.angle)) {
      errs.push_back(where + ": angle is not finite");
    }
  }
  return errs;
}

void apply_gate(std::vector<cplx>& state, int n_qubits, const Gate& gate) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (gate_arity(gate.name) == 1) {
    const Mat2 m = single_qubit_matrix(gate);
    const std::size_t bit = std::size_t{1} << gate.qubits[0];
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (idx & bit) continue;
      const cplx a0 = state[idx];
      const cplx a1 = state[idx | bit];
      state[idx] = m[0] * a0 + m[1] * a1;
      state[idx | bit] = m[2] * a0 + m[3] * a1;
    }
    return;
  }
  const std::size_t b0 = std::size_t{1} << gate.qubits[0];
  const std::size_t b1 = std::size_t{1} << gate.qubits[1];
  for (std::size_t idx = 0; idx < dim; ++idx) {
    switch (gate.name) {
      case GateName::CNOT:
        if ((idx & b0) && !(idx & b1)) std::swap(state[idx], state[idx | b1]);
        break;
      case GateName::CZ:
        if ((idx & b0) && (idx & b1)) state[idx] = -state[idx];
        break;
      case GateName::SWAP:
        if ((idx & b0) && !(idx & b1)) std::swap(state[idx], state[(idx & ~b0) | b1]);
        break;
      default: break;
    }
  }
}

std::vector<cplx> run_circuit(const QuantumCircuitDesign& design) {
  if (auto errs = circuit_errors(design); !errs.empty()) throw ValidationError(errs.front());
  std::vector<cplx> state(std::size_t{1} << design.n_qubits, cplx{0.0, 0.0});
  state[0] = 1.0;
  for (const auto& g : design.gates) apply_gate(state, design.n_qubits, g);
  return state;
}

double entanglement_entropy(const std::vector<cplx>& state, int n_qubits, int n_left) {
  if (n_left <= 0 || n_left >= n_qubits) return 0.0;
  // Amplitude matrix with rows indexed by the left block, columns by the rest;
  // the squared singular values are the Schmidt coefficients.
  const Eigen::Index rows = Eigen::Index{1} << n_left;
  const Eigen::Index cols = Eigen::Index{1} << (n_qubits - n_left);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index idx = 0; idx < rows * cols; ++idx) m(idx % rows, idx / rows) = state[idx];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double entropy = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double p = svd.singularValues()(k) * svd.singularValues()(k);
    if (p > 1e-15) entropy -= p * std::log2(p);
  }
  return std::max(0.0, entropy);
}

QuantumOutcome simulate_quantum(const QuantumCircuitDesign& design,
                                const std::vector<cplx>& target_state) {
  const std::size_t dim = std::size_t{1} << design.n_qubits;
  if (target_state.size() != dim) {
    throw ValidationError("target state has " + std::to_string(target_state.size()) +
                          " amplitudes, circuit needs " + std::to_string(dim));
  }
  double norm = 0.0;
  for (const auto& a : target_state) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-9) throw ValidationError("target state is not normalized");

  QuantumOutcome out;
  out.state = run_circuit(design);
  cplx overlap{0.0, 0.0};
  out.probabilities.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    overlap += std::conj(target_state[k]) * out.state[k];
    out.probabilities[k] = std::norm(out.state[k]);
  }
  out.fidelity = std::clamp(std::norm(overlap), 0.0, 1.0);
  out.entanglement_entropy =
      entanglement_entropy(out.state, design.n_qubits, (design.n_qubits + 1) / 2);
  return out;
}

}  // namespace invdes::oracles
