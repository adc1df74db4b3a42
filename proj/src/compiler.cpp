#include "dqbn/compiler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "dqbn/error.hpp"

namespace dqbn {

namespace {

constexpr double kQuarterPi = 0.78539816339744830961;

// Half-angle identity: RY(t/2), CX, RY(-t/2), CX equals RY(t) on the
// control-on subspace and cancels on the control-off subspace.
void append_cry(std::vector<Gate>& out, double angle, int control, int target) {
    out.push_back(Gate::ry(angle / 2.0, target));
    out.push_back(Gate::cnot(control, target));
    out.push_back(Gate::ry(-angle / 2.0, target));
    out.push_back(Gate::cnot(control, target));
}

void encode_recursive(std::vector<Gate>& out, const std::vector<double>& probs, std::size_t lo,
                      std::size_t size, const std::vector<int>& block, std::size_t level,
                      std::vector<ControlBit>& controls) {
    std::size_t half = size / 2;
    double mass0 = 0.0;
    double mass1 = 0.0;
    for (std::size_t i = 0; i < half; ++i) mass0 += probs[lo + i];
    for (std::size_t i = half; i < size; ++i) mass1 += probs[lo + i];

    int qubit = block[level];
    double angle = (mass0 + mass1 > 0.0) ? rotation_angle(mass0, mass1) : 0.0;
    if (controls.empty()) {
        out.push_back(Gate::ry(angle, qubit));
    } else {
        out.push_back(Gate::controlled_ry(angle, controls, qubit));
    }

    if (level + 1 == block.size()) return;
    controls.push_back({qubit, 1});
    encode_recursive(out, probs, lo + half, half, block, level + 1, controls);
    controls.back().value = 0;
    encode_recursive(out, probs, lo, half, block, level + 1, controls);
    controls.pop_back();
}

std::vector<double> padded_probs(const Distribution& dist, int width) {
    std::vector<double> probs(static_cast<std::size_t>(1) << width, 0.0);
    for (std::size_t s = 0; s < dist.size(); ++s) {
        if (dist[s] < 0.0) {
            throw Error(ErrorCategory::Validation, "distribution has a negative entry");
        }
        probs[s] = dist[s];
    }
    return probs;
}

void throw_on_violations(const std::vector<Violation>& violations) {
    if (violations.empty()) return;
    const Violation& v = violations.front();
    std::ostringstream msg;
    if (!v.node.empty()) msg << "node '" << v.node << "': ";
    msg << v.message;
    throw Error(ErrorCategory::Validation, msg.str());
}

}  // namespace

// On basis states the sequence acts as X for controls (1,1), as a phase
// on (1,0) that is invisible on a |0> target, and as identity otherwise.
void append_and_gate(std::vector<Gate>& out, int control1, int control2, int target) {
    out.push_back(Gate::ry(kQuarterPi, target));
    out.push_back(Gate::cnot(control2, target));
    out.push_back(Gate::ry(kQuarterPi, target));
    out.push_back(Gate::cnot(control1, target));
    out.push_back(Gate::ry(-kQuarterPi, target));
    out.push_back(Gate::cnot(control2, target));
    out.push_back(Gate::ry(-kQuarterPi, target));
}

int qubit_count(int num_states) {
    if (num_states < 2) {
        throw Error(ErrorCategory::Validation, "a variable needs at least 2 states");
    }
    int q = 0;
    while ((1 << q) < num_states) ++q;
    return q;
}

double rotation_angle(double p_zero, double p_one) {
    if (!(p_zero >= 0.0) || !(p_one >= 0.0) || !std::isfinite(p_zero) || !std::isfinite(p_one)) {
        throw Error(ErrorCategory::Validation, "rotation masses must be finite and nonnegative");
    }
    if (p_zero == 0.0 && p_one == 0.0) {
        throw Error(ErrorCategory::Validation, "rotation angle undefined for two zero masses");
    }
    return 2.0 * std::atan2(std::sqrt(p_one), std::sqrt(p_zero));
}

std::vector<Gate> encode_distribution(const Distribution& dist, const std::vector<int>& block,
                                      const std::vector<ControlBit>& controls) {
    if (dist.size() == 0) {
        throw Error(ErrorCategory::Validation, "cannot encode an empty distribution");
    }
    if (dist.size() == 1) {
        if (!block.empty()) {
            throw Error(ErrorCategory::Validation, "single-state distribution takes no qubits");
        }
        return {};
    }
    std::size_t capacity = static_cast<std::size_t>(1) << block.size();
    if (dist.size() > capacity || (block.size() > 0 && dist.size() * 2 <= capacity)) {
        throw Error(ErrorCategory::Validation,
                    "block width does not match distribution size");
    }
    std::vector<double> probs = padded_probs(dist, static_cast<int>(block.size()));
    std::vector<Gate> out;
    std::vector<ControlBit> ctrl = controls;
    encode_recursive(out, probs, 0, probs.size(), block, 0, ctrl);
    return out;
}

Circuit compile_static_ir(const DiscreteNetwork& net) {
    throw_on_violations(validate_network(net));

    Circuit circuit;
    for (const NodeSpec& n : net.nodes) {
        NodeBlock block;
        block.num_states = n.num_states;
        for (int q = 0; q < qubit_count(n.num_states); ++q) {
            block.qubits.push_back(circuit.num_qubits++);
        }
        circuit.layout.blocks.emplace(n.name, block);
    }

    for (const NodeSpec& n : net.nodes) {
        const NodeBlock& block = circuit.layout.block(n.name);
        if (n.parents.empty()) {
            auto gates = encode_distribution(Distribution(n.cpt[0]), block.qubits);
            circuit.gates.insert(circuit.gates.end(), gates.begin(), gates.end());
            continue;
        }

        // Controls cover every parent qubit; conditioned blocks are
        // emitted for every bit pattern in counting order, including
        // patterns that encode no parent state (their conditioning
        // probability is zero, so they get all-zero angles).
        std::vector<int> parent_qubits;
        for (const std::string& p : n.parents) {
            const NodeBlock& pb = circuit.layout.block(p);
            parent_qubits.insert(parent_qubits.end(), pb.qubits.begin(), pb.qubits.end());
        }
        int width = static_cast<int>(parent_qubits.size());
        for (std::size_t pattern = 0; pattern < (std::size_t{1} << width); ++pattern) {
            std::vector<ControlBit> controls(parent_qubits.size());
            for (int j = 0; j < width; ++j) {
                controls[static_cast<std::size_t>(j)] = {
                    parent_qubits[static_cast<std::size_t>(j)],
                    static_cast<int>((pattern >> (width - 1 - j)) & 1)};
            }

            // Recover per-parent state values from the concatenated
            // pattern; out-of-range values mark a dead pattern.
            std::size_t row = 0;
            bool live = true;
            std::size_t shift = static_cast<std::size_t>(width);
            for (const std::string& p : n.parents) {
                const NodeSpec& parent = net.node(p);
                int pw = qubit_count(parent.num_states);
                shift -= static_cast<std::size_t>(pw);
                auto value = (pattern >> shift) & ((std::size_t{1} << pw) - 1);
                if (value >= static_cast<std::size_t>(parent.num_states)) {
                    live = false;
                    break;
                }
                row = row * static_cast<std::size_t>(parent.num_states) + value;
            }

            Distribution dist;
            dist.p.assign(static_cast<std::size_t>(n.num_states), 0.0);
            if (live) dist.p = n.cpt[row];
            auto gates = encode_distribution(dist, block.qubits, controls);
            circuit.gates.insert(circuit.gates.end(), gates.begin(), gates.end());
        }
    }
    return circuit;
}

Circuit compile_transitional_ir(const std::string& variable, const Distribution& posterior,
                                const TransitionModel& model) {
    std::size_t n = static_cast<std::size_t>(model.num_states());
    if (n < 2) {
        throw Error(ErrorCategory::Validation, "transition model needs at least 2 states");
    }
    for (const auto& row : model.matrix) {
        if (row.size() != n) {
            throw Error(ErrorCategory::Validation, "transition matrix is not square");
        }
    }
    if (posterior.size() != n) {
        throw Error(ErrorCategory::Validation,
                    "posterior dimension does not match transition model");
    }

    int width = qubit_count(static_cast<int>(n));
    Circuit circuit;
    NodeBlock slot_t;
    NodeBlock slot_next;
    slot_t.num_states = static_cast<int>(n);
    slot_next.num_states = static_cast<int>(n);
    for (int q = 0; q < width; ++q) slot_t.qubits.push_back(circuit.num_qubits++);
    for (int q = 0; q < width; ++q) slot_next.qubits.push_back(circuit.num_qubits++);
    circuit.layout.blocks.emplace(variable + "[t]", slot_t);
    circuit.layout.blocks.emplace(variable + "[t+1]", slot_next);

    auto gates = encode_distribution(posterior, slot_t.qubits);
    circuit.gates.insert(circuit.gates.end(), gates.begin(), gates.end());

    for (std::size_t pattern = 0; pattern < (std::size_t{1} << width); ++pattern) {
        std::vector<ControlBit> controls(static_cast<std::size_t>(width));
        for (int j = 0; j < width; ++j) {
            controls[static_cast<std::size_t>(j)] = {
                slot_t.qubits[static_cast<std::size_t>(j)],
                static_cast<int>((pattern >> (width - 1 - j)) & 1)};
        }
        Distribution column;
        column.p.assign(n, 0.0);
        if (pattern < n) {
            for (std::size_t j = 0; j < n; ++j) column.p[j] = model.matrix[j][pattern];
        }
        auto block_gates = encode_distribution(column, slot_next.qubits, controls);
        circuit.gates.insert(circuit.gates.end(), block_gates.begin(), block_gates.end());
    }
    return circuit;
}

std::vector<Gate> lower_multi_controlled(const Gate& gate, const std::vector<int>& ancilla_pool) {
    if (gate.kind != GateKind::ControlledRy) {
        throw Error(ErrorCategory::Internal, "lower_multi_controlled expects a controlled rotation");
    }
    std::size_t m = gate.controls.size();
    std::vector<Gate> out;

    // 0-polarity controls become plain |1> controls inside an X sandwich.
    std::vector<int> flipped;
    for (const ControlBit& c : gate.controls) {
        if (c.value == 0) flipped.push_back(c.qubit);
    }
    for (int q : flipped) out.push_back(Gate::x(q));

    if (m == 1) {
        append_cry(out, gate.angle, gate.controls[0].qubit, gate.target);
    } else {
        if (ancilla_pool.size() + 1 < m) {
            throw Error(ErrorCategory::Validation,
                        "insufficient ancillas for multi-controlled rotation");
        }
        // AND-ladder: fold the controls pairwise into the pool, rotate
        // off the final ancilla, then replay the ladder backwards to
        // restore every ancilla to |0>.
        std::vector<std::array<int, 3>> ladder;
        ladder.push_back({gate.controls[0].qubit, gate.controls[1].qubit, ancilla_pool[0]});
        for (std::size_t i = 2; i < m; ++i) {
            ladder.push_back({ancilla_pool[i - 2], gate.controls[i].qubit, ancilla_pool[i - 1]});
        }
        for (const auto& rung : ladder) append_and_gate(out, rung[0], rung[1], rung[2]);
        append_cry(out, gate.angle, ancilla_pool[m - 2], gate.target);
        for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
            append_and_gate(out, (*it)[0], (*it)[1], (*it)[2]);
        }
    }

    for (auto it = flipped.rbegin(); it != flipped.rend(); ++it) out.push_back(Gate::x(*it));
    return out;
}

Circuit lower_circuit(const Circuit& circuit) {
    std::size_t m_max = 0;
    for (const Gate& g : circuit.gates) {
        if (g.kind == GateKind::ControlledRy) m_max = std::max(m_max, g.controls.size());
    }
    std::size_t pool_size = m_max > 0 ? m_max - 1 : 0;

    Circuit lowered;
    lowered.num_qubits = circuit.num_qubits + static_cast<int>(pool_size);
    lowered.layout = circuit.layout;
    lowered.ancillas = circuit.ancillas;
    std::vector<int> pool;
    for (std::size_t i = 0; i < pool_size; ++i) {
        int q = circuit.num_qubits + static_cast<int>(i);
        pool.push_back(q);
        lowered.ancillas.push_back(q);
    }

    for (const Gate& g : circuit.gates) {
        if (g.is_basis()) {
            lowered.gates.push_back(g);
        } else {
            auto gates = lower_multi_controlled(g, pool);
            lowered.gates.insert(lowered.gates.end(), gates.begin(), gates.end());
        }
    }
    return lowered;
}

Circuit compile_static_circuit(const DiscreteNetwork& net) {
    return lower_circuit(compile_static_ir(net));
}

Circuit compile_transitional_circuit(const std::string& variable, const Distribution& posterior,
                                     const TransitionModel& model) {
    return lower_circuit(compile_transitional_ir(variable, posterior, model));
}

}  // namespace dqbn
