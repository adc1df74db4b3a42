#include "dqbn/grover.hpp"

#include <array>
#include <utility>

#include "dqbn/compiler.hpp"
#include "dqbn/error.hpp"

namespace dqbn {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;
constexpr double kTwoPi = 6.28318530717958647692;

struct ConstraintMask {
    std::size_t mask = 0;
    std::size_t value = 0;
};

ConstraintMask constraint_mask(const GoodStateSpec& spec) {
    ConstraintMask cm;
    for (const auto& [qubit, bit] : spec.constraints) {
        std::size_t b = std::size_t{1} << qubit;
        cm.mask |= b;
        if (bit != 0) cm.value |= b;
    }
    return cm;
}

std::size_t block_value(std::size_t index, const std::vector<int>& qubits) {
    std::size_t value = 0;
    std::size_t width = qubits.size();
    for (std::size_t j = 0; j < width; ++j) {
        value |= ((index >> qubits[j]) & 1u) << (width - 1 - j);
    }
    return value;
}

// Shared tally for exact masses and shot counts.
template <typename Entries>
Distribution tally_posterior(const Entries& entries, const GoodStateSpec& spec,
                             const QubitLayout& layout, const std::string& target,
                             const char* empty_message) {
    const NodeBlock& block = layout.block(target);
    ConstraintMask cm = constraint_mask(spec);
    Distribution dist;
    dist.p.assign(static_cast<std::size_t>(block.num_states), 0.0);
    double total = 0.0;
    for (const auto& [index, weight] : entries) {
        if ((index & cm.mask) != cm.value) continue;
        std::size_t value = block_value(index, block.qubits);
        if (value >= static_cast<std::size_t>(block.num_states)) continue;
        dist.p[value] += weight;
        total += weight;
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCategory::Inference, empty_message);
    }
    for (double& v : dist.p) v /= total;
    return dist;
}

}  // namespace

bool GoodStateSpec::matches(std::size_t index) const {
    ConstraintMask cm = constraint_mask(*this);
    return (index & cm.mask) == cm.value;
}

void validate_spec(const GoodStateSpec& spec, int num_qubits) {
    for (const auto& [qubit, bit] : spec.constraints) {
        if (qubit < 0 || qubit >= num_qubits) {
            throw Error(ErrorCategory::Inference, "constraint qubit index out of range");
        }
        if (bit != 0 && bit != 1) {
            throw Error(ErrorCategory::Inference, "constraint bit must be 0 or 1");
        }
    }
    for (int q : spec.free_qubits) {
        if (q < 0 || q >= num_qubits) {
            throw Error(ErrorCategory::Inference, "free qubit index out of range");
        }
        if (spec.constraints.count(q)) {
            throw Error(ErrorCategory::Inference,
                        "qubit " + std::to_string(q) + " is both constrained and free");
        }
    }
}

void phase_oracle(StateVector& state, const GoodStateSpec& spec) {
    validate_spec(spec, state.num_qubits);
    ConstraintMask cm = constraint_mask(spec);
    for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
        if ((idx & cm.mask) == cm.value) state.amplitudes[idx] = -state.amplitudes[idx];
    }
}

void zero_reflection(StateVector& state) {
    state.amplitudes[0] = -state.amplitudes[0];
}

double good_mass(const StateVector& state, const GoodStateSpec& spec) {
    validate_spec(spec, state.num_qubits);
    ConstraintMask cm = constraint_mask(spec);
    double mass = 0.0;
    for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
        if ((idx & cm.mask) == cm.value) mass += state.probability(idx);
    }
    return mass;
}

StateVector grover_apply(const GroverPlan& plan, ExecutionPolicy policy) {
    if (plan.iterations < 0) {
        throw Error(ErrorCategory::Validation, "iteration count must be nonnegative");
    }
    validate_spec(plan.spec, plan.a.num_qubits);
    StateVector state = simulate(plan.a, policy);
    if (plan.iterations == 0) return state;
    Circuit a_dagger = inverse(plan.a);
    for (int k = 0; k < plan.iterations; ++k) {
        phase_oracle(state, plan.spec);
        state = simulate(a_dagger, std::move(state), policy);
        zero_reflection(state);
        state = simulate(plan.a, std::move(state), policy);
    }
    return state;
}

IterationSweep select_iterations(const Circuit& a, const GoodStateSpec& spec, int k_max) {
    if (k_max < 0) {
        throw Error(ErrorCategory::Validation, "k_max must be nonnegative");
    }
    validate_spec(spec, a.num_qubits);

    IterationSweep sweep;
    StateVector state = simulate(a);
    sweep.good_mass.push_back(good_mass(state, spec));
    Circuit a_dagger = inverse(a);
    for (int k = 1; k <= k_max; ++k) {
        phase_oracle(state, spec);
        state = simulate(a_dagger, std::move(state));
        zero_reflection(state);
        state = simulate(a, std::move(state));
        sweep.good_mass.push_back(good_mass(state, spec));
    }
    for (std::size_t k = 1; k < sweep.good_mass.size(); ++k) {
        if (sweep.good_mass[k] > sweep.good_mass[static_cast<std::size_t>(sweep.best_k)]) {
            sweep.best_k = static_cast<int>(k);
        }
    }
    return sweep;
}

Distribution posterior_from_counts(const ShotCounts& counts, const GoodStateSpec& spec,
                                   const QubitLayout& layout, const std::string& target) {
    validate_spec(spec, counts.num_qubits);
    std::vector<std::pair<std::size_t, double>> entries;
    entries.reserve(counts.counts.size());
    for (const auto& [index, count] : counts.counts) {
        entries.emplace_back(index, static_cast<double>(count));
    }
    return tally_posterior(entries, spec, layout, target, "no good-state samples");
}

Distribution posterior_from_state(const StateVector& state, const GoodStateSpec& spec,
                                  const QubitLayout& layout, const std::string& target) {
    validate_spec(spec, state.num_qubits);
    std::vector<std::pair<std::size_t, double>> entries;
    entries.reserve(state.dimension());
    for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
        double p = state.probability(idx);
        if (p > 0.0) entries.emplace_back(idx, p);
    }
    return tally_posterior(entries, spec, layout, target, "no good-state probability mass");
}

Circuit oracle_circuit(const GoodStateSpec& spec, int num_qubits) {
    if (num_qubits < 1) {
        throw Error(ErrorCategory::Inference, "oracle circuit needs at least 1 qubit");
    }
    validate_spec(spec, num_qubits);

    Circuit circuit;
    circuit.num_qubits = num_qubits;
    if (spec.constraints.empty()) {
        // Global -1 phase: RY(2*pi) is minus identity on one qubit.
        circuit.gates.push_back(Gate::ry(kTwoPi, 0));
        return circuit;
    }

    std::vector<int> constrained;
    std::vector<int> flipped;
    for (const auto& [qubit, bit] : spec.constraints) {
        constrained.push_back(qubit);
        if (bit == 0) flipped.push_back(qubit);
    }
    for (int q : flipped) circuit.gates.push_back(Gate::x(q));

    // Z on one qubit is RY(pi/2), X, RY(-pi/2); controlling the X turns
    // it into a controlled-Z from any AND result.
    std::size_t m = constrained.size();
    if (m == 1) {
        circuit.gates.push_back(Gate::ry(kHalfPi, constrained[0]));
        circuit.gates.push_back(Gate::x(constrained[0]));
        circuit.gates.push_back(Gate::ry(-kHalfPi, constrained[0]));
    } else if (m == 2) {
        circuit.gates.push_back(Gate::ry(kHalfPi, constrained[1]));
        circuit.gates.push_back(Gate::cnot(constrained[0], constrained[1]));
        circuit.gates.push_back(Gate::ry(-kHalfPi, constrained[1]));
    } else {
        // AND the first m-1 constrained qubits into fresh ancillas,
        // apply the controlled-Z onto the last one, then uncompute.
        int target = constrained[m - 1];
        std::vector<int> pool;
        for (std::size_t i = 0; i + 2 < m; ++i) {
            pool.push_back(circuit.num_qubits);
            circuit.ancillas.push_back(circuit.num_qubits++);
        }
        std::vector<std::array<int, 3>> ladder;
        ladder.push_back({constrained[0], constrained[1], pool[0]});
        for (std::size_t i = 2; i + 1 < m; ++i) {
            ladder.push_back({pool[i - 2], constrained[i], pool[i - 1]});
        }
        for (const auto& rung : ladder) {
            append_and_gate(circuit.gates, rung[0], rung[1], rung[2]);
        }
        circuit.gates.push_back(Gate::ry(kHalfPi, target));
        circuit.gates.push_back(Gate::cnot(pool.back(), target));
        circuit.gates.push_back(Gate::ry(-kHalfPi, target));
        for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
            append_and_gate(circuit.gates, (*it)[0], (*it)[1], (*it)[2]);
        }
    }

    for (auto it = flipped.rbegin(); it != flipped.rend(); ++it) {
        circuit.gates.push_back(Gate::x(*it));
    }
    return circuit;
}

Circuit zero_reflection_circuit(int num_qubits) {
    GoodStateSpec all_zero;
    for (int q = 0; q < num_qubits; ++q) all_zero.constraints[q] = 0;
    return oracle_circuit(all_zero, num_qubits);
}

ShotCounts grover_counts_noisy(const GroverPlan& plan, const NoiseConfig& noise,
                               std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw Error(ErrorCategory::Validation, "sampling requires at least one shot");
    }
    if (plan.iterations < 0) {
        throw Error(ErrorCategory::Validation, "iteration count must be nonnegative");
    }
    validate_spec(plan.spec, plan.a.num_qubits);
    validate_noise(noise, plan.a.num_qubits);

    Circuit a_dagger = inverse(plan.a);
    ShotCounts result;
    result.num_qubits = plan.a.num_qubits;
    result.shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
        Rng rng(derive_seed(seed, s));
        StateVector state = StateVector::zero(plan.a.num_qubits);
        apply_circuit_noisy(state, plan.a, noise, rng);
        for (int k = 0; k < plan.iterations; ++k) {
            phase_oracle(state, plan.spec);
            apply_circuit_noisy(state, a_dagger, noise, rng);
            zero_reflection(state);
            apply_circuit_noisy(state, plan.a, noise, rng);
        }
        std::size_t outcome = measure_once(state, rng);
        outcome = apply_readout_flips(outcome, noise, plan.a.num_qubits, rng);
        ++result.counts[outcome];
    }
    return result;
}

}  // namespace dqbn
