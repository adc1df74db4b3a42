#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dqbn/bayes_net.hpp"
#include "dqbn/circuit.hpp"
#include "dqbn/rng.hpp"

namespace dqbn {

// Dense simulation is exact but exponential; past this point a state
// vector would not fit in memory anyway.
inline constexpr int kMaxQubits = 26;

// Kernel selection: Serial runs the reference loops, Parallel the
// OpenMP ones, Auto switches to Parallel once the state has at least
// 2^14 amplitudes. Both kernels perform bitwise-identical arithmetic
// per amplitude pair, so results do not depend on the choice.
enum class ExecutionPolicy { Serial, Parallel, Auto };

struct StateVector {
    int num_qubits = 0;
    std::vector<std::complex<double>> amplitudes;

    static StateVector zero(int num_qubits);

    std::size_t dimension() const { return amplitudes.size(); }
    double probability(std::size_t index) const { return std::norm(amplitudes[index]); }
    // Total probability mass; 1 within 1e-12 after noiseless evolution.
    double norm() const;
};

// In-place application of one gate (all four kinds, polarity-annotated
// controls included).
void apply_gate(StateVector& state, const Gate& gate,
                ExecutionPolicy policy = ExecutionPolicy::Auto);

StateVector simulate(const Circuit& circuit, StateVector initial,
                     ExecutionPolicy policy = ExecutionPolicy::Auto);
StateVector simulate(const Circuit& circuit, ExecutionPolicy policy = ExecutionPolicy::Auto);

// Distribution over the bit patterns of the given qubits (listed most
// significant first), tracing out everything else; normalized.
Distribution marginal_probabilities(const StateVector& state, const std::vector<int>& qubits);

// Bit-pattern string with qubit 0 as the rightmost character.
std::string bit_pattern(std::size_t index, int num_qubits);

struct ShotCounts {
    int num_qubits = 0;
    std::uint64_t shots = 0;
    std::map<std::uint64_t, std::uint64_t> counts;  // basis-state index -> count
};

// Multinomial draw from |amplitude|^2. All draws come from one
// sequential stream seeded per call, so counts are reproducible
// independent of kernel parallelism.
ShotCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

struct NoiseConfig {
    // Probability of a depolarizing event after each single-qubit /
    // multi-qubit gate; an event applies an independent uniformly
    // chosen Pauli to every qubit the gate touched.
    double depolarizing_1q = 0.0;
    double depolarizing_2q = 0.0;
    // Per-qubit classical readout flip probabilities; empty means no
    // readout error, otherwise one entry per qubit.
    std::vector<double> readout_flip;

    bool is_zero() const;
};

void validate_noise(const NoiseConfig& noise, int num_qubits);

// One noisy pass of a circuit: exact gate, then a possible Pauli kick,
// consuming `rng` in gate order. Building block for trajectory loops.
void apply_circuit_noisy(StateVector& state, const Circuit& circuit, const NoiseConfig& noise,
                         Rng& rng);

// One measurement outcome drawn from |amplitude|^2.
std::size_t measure_once(const StateVector& state, Rng& rng);

// Classical readout flips applied to a measured outcome.
std::size_t apply_readout_flips(std::size_t outcome, const NoiseConfig& noise, int num_qubits,
                                Rng& rng);

// Monte Carlo trajectories: every shot re-runs the circuit with its own
// derived sub-seed, measures once, and applies readout flips.
ShotCounts simulate_noisy(const Circuit& circuit, const NoiseConfig& noise, std::uint64_t shots,
                          std::uint64_t seed);

}  // namespace dqbn
