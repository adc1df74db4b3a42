#include "dqbn/qsim.hpp"

#include <algorithm>
#include <cmath>

#include "dqbn/error.hpp"

namespace dqbn {

namespace {

constexpr std::size_t kAutoParallelThreshold = std::size_t{1} << 14;

struct ControlPredicate {
    std::size_t mask = 0;
    std::size_t value = 0;

    bool matches(std::size_t index) const { return (index & mask) == value; }
};

ControlPredicate control_predicate(const Gate& gate, int num_qubits) {
    ControlPredicate pred;
    for (const ControlBit& c : gate.controls) {
        if (c.qubit < 0 || c.qubit >= num_qubits || c.qubit == gate.target) {
            throw Error(ErrorCategory::Simulation, "gate control index out of range");
        }
        std::size_t bit = std::size_t{1} << c.qubit;
        pred.mask |= bit;
        if (c.value != 0) pred.value |= bit;
    }
    return pred;
}

bool use_parallel(const StateVector& state, ExecutionPolicy policy) {
    switch (policy) {
        case ExecutionPolicy::Serial: return false;
        case ExecutionPolicy::Parallel: return true;
        case ExecutionPolicy::Auto: return state.dimension() >= kAutoParallelThreshold;
    }
    return false;
}

// Maps a pair index in [0, dim/2) to the basis index whose target bit
// is 0; the partner differs only in the target bit.
inline std::size_t pair_low_index(std::size_t i, std::size_t low_mask) {
    return ((i & ~low_mask) << 1) | (i & low_mask);
}

void rotate_pairs(StateVector& state, int target, const ControlPredicate& pred, double angle,
                  bool parallel) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t low_mask = tbit - 1;
    const std::int64_t half = static_cast<std::int64_t>(state.dimension() / 2);
    auto* amp = state.amplitudes.data();

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < half; ++i) {
        std::size_t lo = pair_low_index(static_cast<std::size_t>(i), low_mask);
        if (!pred.matches(lo)) continue;
        std::size_t hi = lo | tbit;
        std::complex<double> a0 = amp[lo];
        std::complex<double> a1 = amp[hi];
        amp[lo] = c * a0 - s * a1;
        amp[hi] = s * a0 + c * a1;
    }
}

void swap_pairs(StateVector& state, int target, const ControlPredicate& pred, bool parallel) {
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t low_mask = tbit - 1;
    const std::int64_t half = static_cast<std::int64_t>(state.dimension() / 2);
    auto* amp = state.amplitudes.data();

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < half; ++i) {
        std::size_t lo = pair_low_index(static_cast<std::size_t>(i), low_mask);
        if (!pred.matches(lo)) continue;
        std::swap(amp[lo], amp[lo | tbit]);
    }
}

void apply_pauli(StateVector& state, int qubit, int pauli) {
    const std::size_t tbit = std::size_t{1} << qubit;
    const std::size_t low_mask = tbit - 1;
    const std::size_t half = state.dimension() / 2;
    auto* amp = state.amplitudes.data();
    const std::complex<double> i_unit(0.0, 1.0);

    for (std::size_t i = 0; i < half; ++i) {
        std::size_t lo = pair_low_index(i, low_mask);
        std::size_t hi = lo | tbit;
        switch (pauli) {
            case 0:  // X
                std::swap(amp[lo], amp[hi]);
                break;
            case 1: {  // Y
                std::complex<double> a0 = amp[lo];
                amp[lo] = -i_unit * amp[hi];
                amp[hi] = i_unit * a0;
                break;
            }
            default:  // Z
                amp[hi] = -amp[hi];
                break;
        }
    }
}

}  // namespace

StateVector StateVector::zero(int num_qubits) {
    if (num_qubits < 1) {
        throw Error(ErrorCategory::Simulation, "state vector needs at least 1 qubit");
    }
    if (num_qubits > kMaxQubits) {
        throw Error(ErrorCategory::Simulation,
                    "state vector capped at " + std::to_string(kMaxQubits) + " qubits, got " +
                        std::to_string(num_qubits));
    }
    StateVector state;
    state.num_qubits = num_qubits;
    state.amplitudes.assign(std::size_t{1} << num_qubits, {0.0, 0.0});
    state.amplitudes[0] = {1.0, 0.0};
    return state;
}

double StateVector::norm() const {
    double total = 0.0;
    for (const auto& a : amplitudes) total += std::norm(a);
    return total;
}

void apply_gate(StateVector& state, const Gate& gate, ExecutionPolicy policy) {
    if (gate.target < 0 || gate.target >= state.num_qubits) {
        throw Error(ErrorCategory::Simulation, "gate target index out of range");
    }
    if (!std::isfinite(gate.angle)) {
        throw Error(ErrorCategory::Simulation, "gate angle is not finite");
    }
    ControlPredicate pred = control_predicate(gate, state.num_qubits);
    bool parallel = use_parallel(state, policy);

    switch (gate.kind) {
        case GateKind::Ry:
        case GateKind::ControlledRy:
            rotate_pairs(state, gate.target, pred, gate.angle, parallel);
            break;
        case GateKind::X:
        case GateKind::Cnot:
            swap_pairs(state, gate.target, pred, parallel);
            break;
    }
}

StateVector simulate(const Circuit& circuit, StateVector initial, ExecutionPolicy policy) {
    if (initial.num_qubits != circuit.num_qubits) {
        throw Error(ErrorCategory::Simulation,
                    "initial state dimension does not match the circuit");
    }
    for (const Gate& g : circuit.gates) apply_gate(initial, g, policy);
    return initial;
}

StateVector simulate(const Circuit& circuit, ExecutionPolicy policy) {
    return simulate(circuit, StateVector::zero(circuit.num_qubits), policy);
}

Distribution marginal_probabilities(const StateVector& state, const std::vector<int>& qubits) {
    if (qubits.empty()) {
        throw Error(ErrorCategory::Simulation, "marginal over an empty qubit subset");
    }
    for (int q : qubits) {
        if (q < 0 || q >= state.num_qubits) {
            throw Error(ErrorCategory::Simulation, "marginal qubit index out of range");
        }
    }
    std::size_t width = qubits.size();
    Distribution dist;
    dist.p.assign(std::size_t{1} << width, 0.0);
    for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
        double p = state.probability(idx);
        if (p == 0.0) continue;
        std::size_t value = 0;
        for (std::size_t j = 0; j < width; ++j) {
            value |= ((idx >> qubits[j]) & 1u) << (width - 1 - j);
        }
        dist.p[value] += p;
    }
    dist.normalize();
    return dist;
}

std::string bit_pattern(std::size_t index, int num_qubits) {
    std::string out(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if ((index >> q) & 1u) out[static_cast<std::size_t>(num_qubits - 1 - q)] = '1';
    }
    return out;
}

ShotCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw Error(ErrorCategory::Validation, "sampling requires at least one shot");
    }
    std::vector<double> cdf(state.dimension());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        acc += state.probability(i);
        cdf[i] = acc;
    }

    ShotCounts result;
    result.num_qubits = state.num_qubits;
    result.shots = shots;
    Rng rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), state.dimension() - 1);
        ++result.counts[idx];
    }
    return result;
}

bool NoiseConfig::is_zero() const {
    if (depolarizing_1q != 0.0 || depolarizing_2q != 0.0) return false;
    return std::all_of(readout_flip.begin(), readout_flip.end(),
                       [](double p) { return p == 0.0; });
}

void validate_noise(const NoiseConfig& noise, int num_qubits) {
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(noise.depolarizing_1q) || !in_unit(noise.depolarizing_2q)) {
        throw Error(ErrorCategory::Validation, "depolarizing probabilities must lie in [0, 1]");
    }
    if (!noise.readout_flip.empty() &&
        noise.readout_flip.size() != static_cast<std::size_t>(num_qubits)) {
        throw Error(ErrorCategory::Validation,
                    "readout_flip needs one entry per qubit (or none)");
    }
    for (double p : noise.readout_flip) {
        if (!in_unit(p)) {
            throw Error(ErrorCategory::Validation, "readout probabilities must lie in [0, 1]");
        }
    }
}

void apply_circuit_noisy(StateVector& state, const Circuit& circuit, const NoiseConfig& noise,
                         Rng& rng) {
    if (state.num_qubits != circuit.num_qubits) {
        throw Error(ErrorCategory::Simulation,
                    "initial state dimension does not match the circuit");
    }
    for (const Gate& g : circuit.gates) {
        apply_gate(state, g, ExecutionPolicy::Serial);
        bool multi = g.kind == GateKind::Cnot || g.kind == GateKind::ControlledRy;
        double p = multi ? noise.depolarizing_2q : noise.depolarizing_1q;
        if (p <= 0.0) continue;
        if (rng.uniform() >= p) continue;
        auto kick = [&](int qubit) {
            int pauli = static_cast<int>(rng.uniform() * 3.0);
            apply_pauli(state, qubit, std::min(pauli, 2));
        };
        kick(g.target);
        for (const ControlBit& c : g.controls) kick(c.qubit);
    }
}

std::size_t measure_once(const StateVector& state, Rng& rng) {
    double total = state.norm();
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        acc += state.probability(i);
        if (u < acc) return i;
    }
    return state.dimension() - 1;
}

std::size_t apply_readout_flips(std::size_t outcome, const NoiseConfig& noise, int num_qubits,
                                Rng& rng) {
    if (noise.readout_flip.empty()) return outcome;
    for (int q = 0; q < num_qubits; ++q) {
        double p = noise.readout_flip[static_cast<std::size_t>(q)];
        if (p > 0.0 && rng.uniform() < p) outcome ^= std::size_t{1} << q;
    }
    return outcome;
}

ShotCounts simulate_noisy(const Circuit& circuit, const NoiseConfig& noise, std::uint64_t shots,
                          std::uint64_t seed) {
    if (shots == 0) {
        throw Error(ErrorCategory::Validation, "sampling requires at least one shot");
    }
    validate_noise(noise, circuit.num_qubits);

    ShotCounts result;
    result.num_qubits = circuit.num_qubits;
    result.shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
        Rng rng(derive_seed(seed, s));
        StateVector state = StateVector::zero(circuit.num_qubits);
        apply_circuit_noisy(state, circuit, noise, rng);
        std::size_t outcome = measure_once(state, rng);
        outcome = apply_readout_flips(outcome, noise, circuit.num_qubits, rng);
        ++result.counts[outcome];
    }
    return result;
}

}  // namespace dqbn
