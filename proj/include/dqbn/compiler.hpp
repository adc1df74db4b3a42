#pragma once

#include <string>
#include <vector>

#include "dqbn/bayes_net.hpp"
#include "dqbn/circuit.hpp"

namespace dqbn {

// Number of qubits for a variable with num_states states: ceil(log2).
// Throws for fewer than two states.
int qubit_count(int num_states);

// Angle theta in [0, pi] with cos^2(theta/2) proportional to p_zero and
// sin^2(theta/2) proportional to p_one. Degenerate masses map to the
// arctan limits: (p, 0) -> 0, (0, p) -> pi. Both masses zero is an error.
double rotation_angle(double p_zero, double p_one);

// Recursive amplitude encoding of a distribution onto a qubit block
// (most-significant qubit first). Emits one rotation on the leading
// qubit grouped by leading bit, then the |1>-branch and |0>-branch
// sub-encodings with the leading qubit appended to the controls.
// Zero-mass branches are still emitted with angle 0 so the gate
// structure depends only on the block shape.
std::vector<Gate> encode_distribution(const Distribution& dist, const std::vector<int>& block,
                                      const std::vector<ControlBit>& controls = {});

// Multi-controlled circuit over the variable qubits only: one
// encode_distribution block per root, and per child one conditioned
// block for every parent-qubit bit pattern in counting order (patterns
// that encode no parent state get all-zero angles). Gates may carry
// polarity-annotated controls; see lower_circuit.
Circuit compile_static_ir(const DiscreteNetwork& net);

// Two-slice circuit for one tracked variable: encode the posterior on
// the slot-t block, then one conditioned block per slot-t bit pattern
// encoding the matching transition column on the slot-(t+1) block.
// Layout keys are "<name>[t]" and "<name>[t+1]".
Circuit compile_transitional_ir(const std::string& variable, const Distribution& posterior,
                                const TransitionModel& model);

// Rewrites every gate into the {ry, x, cx} basis set, appending an
// ancilla pool of max(0, m_max - 1) qubits where m_max is the largest
// control count in the circuit. Ancillas are returned to |0> after
// every lowered gate.
Circuit lower_circuit(const Circuit& circuit);

// Basis realization of one controlled rotation. Zero-polarity controls
// are X-conjugated; one control uses the half-angle identity; two or
// more controls AND into the pool ancillas and uncompute afterwards.
// Throws when the pool is smaller than controls - 1.
std::vector<Gate> lower_multi_controlled(const Gate& gate, const std::vector<int>& ancilla_pool);

// Exact AND of two |1>-polarity controls onto a |0>-initialized target
// (a simplified Toffoli over {ry, x, cx}); self-inverse, so replaying
// the same gates uncomputes the AND.
void append_and_gate(std::vector<Gate>& out, int control1, int control2, int target);

// compile_*_ir followed by lower_circuit.
Circuit compile_static_circuit(const DiscreteNetwork& net);
Circuit compile_transitional_circuit(const std::string& variable, const Distribution& posterior,
                                     const TransitionModel& model);

}  // namespace dqbn
