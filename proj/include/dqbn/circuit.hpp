#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dqbn {

enum class GateKind : std::uint8_t {
    Ry,            // single-qubit Y rotation
    X,             // bit flip
    Cnot,          // controlled-X, control polarity always |1>
    ControlledRy,  // R_Y with >= 1 polarity-annotated controls (IR only)
};

// A control with required polarity: value 1 fires on |1>, value 0 on |0>.
struct ControlBit {
    int qubit = 0;
    int value = 1;

    friend bool operator==(const ControlBit&, const ControlBit&) = default;
};

struct Gate {
    GateKind kind = GateKind::Ry;
    double angle = 0.0;  // Ry / ControlledRy only
    int target = 0;
    std::vector<ControlBit> controls;  // Cnot: exactly one, polarity 1

    static Gate ry(double angle, int target);
    static Gate x(int target);
    static Gate cnot(int control, int target);
    static Gate controlled_ry(double angle, std::vector<ControlBit> controls, int target);

    bool is_basis() const { return kind != GateKind::ControlledRy; }
};

// Per-node qubit block. Qubits are listed most-significant bit first:
// a node with n_s states maps state s to the s-th bit pattern in binary
// counting order over its block (3 states -> |00>, |01>, |10>).
struct NodeBlock {
    std::vector<int> qubits;
    int num_states = 0;

    int width() const { return static_cast<int>(qubits.size()); }
};

struct QubitLayout {
    std::map<std::string, NodeBlock> blocks;

    const NodeBlock& block(const std::string& name) const;
};

struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;
    QubitLayout layout;
    std::vector<int> ancillas;

    bool all_basis() const;
};

struct CircuitMetrics {
    int qubits = 0;
    int depth = 0;
    std::size_t total_gates = 0;
    std::size_t cnot_count = 0;
    std::size_t ry_count = 0;
    std::size_t x_count = 0;
};

// Depth is the longest dependency chain where two gates depend on each
// other iff they touch a common qubit (controls included).
CircuitMetrics circuit_metrics(const Circuit& circuit);

// Reversed gate order with every rotation negated; X and CNOT are
// self-inverse.
Circuit inverse(const Circuit& circuit);

// OpenQASM 2.0 text over the basis set {ry, x, cx}. Angles are printed
// with 17 significant digits. Throws if a non-basis gate is present.
std::string emit_qasm(const Circuit& circuit);

}  // namespace dqbn
