#include "dqbn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dqbn/error.hpp"

namespace dqbn {

Gate Gate::ry(double angle, int target) {
    Gate g;
    g.kind = GateKind::Ry;
    g.angle = angle;
    g.target = target;
    return g;
}

Gate Gate::x(int target) {
    Gate g;
    g.kind = GateKind::X;
    g.target = target;
    return g;
}

Gate Gate::cnot(int control, int target) {
    Gate g;
    g.kind = GateKind::Cnot;
    g.target = target;
    g.controls = {{control, 1}};
    return g;
}

Gate Gate::controlled_ry(double angle, std::vector<ControlBit> controls, int target) {
    if (controls.empty()) {
        throw Error(ErrorCategory::Internal, "controlled_ry requires at least one control");
    }
    Gate g;
    g.kind = GateKind::ControlledRy;
    g.angle = angle;
    g.target = target;
    g.controls = std::move(controls);
    return g;
}

const NodeBlock& QubitLayout::block(const std::string& name) const {
    auto it = blocks.find(name);
    if (it == blocks.end()) {
        throw Error(ErrorCategory::Internal, "layout has no block for node '" + name + "'");
    }
    return it->second;
}

bool Circuit::all_basis() const {
    return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.is_basis(); });
}

CircuitMetrics circuit_metrics(const Circuit& circuit) {
    CircuitMetrics m;
    m.qubits = circuit.num_qubits;
    m.total_gates = circuit.gates.size();

    std::vector<int> qubit_depth(static_cast<std::size_t>(circuit.num_qubits), 0);
    for (const Gate& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::Cnot: ++m.cnot_count; break;
            case GateKind::Ry:
            case GateKind::ControlledRy: ++m.ry_count; break;
            case GateKind::X: ++m.x_count; break;
        }
        int level = qubit_depth[static_cast<std::size_t>(g.target)];
        for (const ControlBit& c : g.controls) {
            level = std::max(level, qubit_depth[static_cast<std::size_t>(c.qubit)]);
        }
        ++level;
        qubit_depth[static_cast<std::size_t>(g.target)] = level;
        for (const ControlBit& c : g.controls) {
            qubit_depth[static_cast<std::size_t>(c.qubit)] = level;
        }
        m.depth = std::max(m.depth, level);
    }
    return m;
}

Circuit inverse(const Circuit& circuit) {
    Circuit inv = circuit;
    std::reverse(inv.gates.begin(), inv.gates.end());
    for (Gate& g : inv.gates) {
        if (g.kind == GateKind::Ry || g.kind == GateKind::ControlledRy) {
            g.angle = -g.angle;
        }
    }
    return inv;
}

std::string emit_qasm(const Circuit& circuit) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "qreg q[" << circuit.num_qubits << "];\n";
    char angle[64];
    for (const Gate& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::Ry:
                std::snprintf(angle, sizeof(angle), "%.17g", g.angle);
                out << "ry(" << angle << ") q[" << g.target << "];\n";
                break;
            case GateKind::X:
                out << "x q[" << g.target << "];\n";
                break;
            case GateKind::Cnot:
                out << "cx q[" << g.controls.front().qubit << "],q[" << g.target << "];\n";
                break;
            case GateKind::ControlledRy:
                throw Error(ErrorCategory::Simulation,
                            "circuit contains a non-basis gate; lower it before QASM export");
        }
    }
    return out.str();
}

}  // namespace dqbn
