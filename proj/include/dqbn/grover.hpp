#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dqbn/bayes_net.hpp"
#include "dqbn/circuit.hpp"
#include "dqbn/qsim.hpp"

namespace dqbn {

// "Good" basis states are those whose constrained qubits carry the
// required bits. Ancillas always join the constraints at 0; the free
// qubits name the inference target's block and stay unconstrained.
struct GoodStateSpec {
    std::map<int, int> constraints;  // qubit index -> required bit
    std::vector<int> free_qubits;    // target block, most significant first

    bool matches(std::size_t index) const;
};

void validate_spec(const GoodStateSpec& spec, int num_qubits);

// S_e: negates the amplitude of every basis state matching all
// constraints (diagonal pass; unitarily equal to the lowered circuit).
void phase_oracle(StateVector& state, const GoodStateSpec& spec);

// S_0 = I - 2|0...0><0...0|: negates the all-zeros amplitude.
void zero_reflection(StateVector& state);

// Total probability mass on good states.
double good_mass(const StateVector& state, const GoodStateSpec& spec);

struct GroverPlan {
    Circuit a;           // lowered state-preparation circuit
    GoodStateSpec spec;  // evidence + ancilla constraints
    int iterations = 0;
};

// A|0>, then `iterations` rounds of S_e, A-dagger, S_0, A.
StateVector grover_apply(const GroverPlan& plan,
                         ExecutionPolicy policy = ExecutionPolicy::Auto);

struct IterationSweep {
    int best_k = 0;
    std::vector<double> good_mass;  // index k in 0..k_max
};

// Exact sweep of the good mass over k = 0..k_max; best_k is the argmax
// (smallest k on ties).
IterationSweep select_iterations(const Circuit& a, const GoodStateSpec& spec, int k_max);

// Posterior of the target node: keep only good shots (amplitude mass),
// tally them by the target block's bit pattern, and normalize. Patterns
// that encode no state (possible only under noise) are discarded.
Distribution posterior_from_counts(const ShotCounts& counts, const GoodStateSpec& spec,
                                   const QubitLayout& layout, const std::string& target);
Distribution posterior_from_state(const StateVector& state, const GoodStateSpec& spec,
                                  const QubitLayout& layout, const std::string& target);

// Circuit realizations of the diagonal transforms for artifact export;
// both may append ladder ancillas beyond num_qubits.
Circuit oracle_circuit(const GoodStateSpec& spec, int num_qubits);
Circuit zero_reflection_circuit(int num_qubits);

// Trajectory sampling of the full Grover sequence: the preparation
// passes run under gate noise while the diagonal reflections stay
// exact, mirroring how the oracle is realized in simulation.
ShotCounts grover_counts_noisy(const GroverPlan& plan, const NoiseConfig& noise,
                               std::uint64_t shots, std::uint64_t seed);

}  // namespace dqbn
