#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace invdes::oracles {

using cplx = std::complex<double>;

enum class GateName { H, X, Y, Z, S, T, CNOT, CZ, SWAP, RX, RY, RZ };

struct Gate {
  GateName name = GateName::H;
  std::vector<int> qubits;
  std::optional<double> angle;  // radians, RX/RY/RZ only
};

struct QuantumCircuitDesign {
  int n_qubits = 1;
  std::vector<Gate> gates;
};

inline constexpr int kMaxQubits = 4;
inline constexpr std::size_t kMaxGates = 64;

struct QuantumOutcome {
  double fidelity = 0.0;
  std::vector<double> probabilities;  // basis index bit q <-> qubit q
  double entanglement_entropy = 0.0;  // bits, qubits [0, ceil(n/2)) vs rest
  std::vector<cplx> state;
};

std::optional<GateName> gate_from_string(const std::string& s);
std::string to_string(GateName g);
int gate_arity(GateName g);
bool gate_takes_angle(GateName g);

/// Empty when the circuit is well formed, otherwise one message per problem.
std::vector<std::string> circuit_errors(const QuantumCircuitDesign& design);

/// Applies one gate in place. The state must have 2^n amplitudes.
void apply_gate(std::vector<cplx>& state, int n_qubits, const Gate& gate);

std::vector<cplx> run_circuit(const QuantumCircuitDesign& design);

/// Von Neumann entropy in bits of qubits [0, n_left) of a pure state.
double entanglement_entropy(const std::vector<cplx>& state, int n_qubits, int n_left);

/// Evolves |0...0>, compares with `target_state` (normalized to 1e-9).
QuantumOutcome simulate_quantum(const QuantumCircuitDesign& design,
                                const std::vector<cplx>& target_state);

}  // namespace invdes::oracles
