// Timing comparison of the serial reference kernels against the OpenMP
// ones: one RY sweep and one CNOT ladder over every qubit, repeated on
// growing register sizes. Both paths compute identical amplitudes; the
// point of the benchmark is the crossover where threading starts to
// pay for itself.
#include <chrono>
#include <cstdio>
#include <vector>

#include "dqbn/circuit.hpp"
#include "dqbn/qsim.hpp"
#include "dqbn/rng.hpp"

namespace {

dqbn::Circuit sweep_circuit(int num_qubits) {
    dqbn::Circuit circuit;
    circuit.num_qubits = num_qubits;
    for (int q = 0; q < num_qubits; ++q) {
        circuit.gates.push_back(dqbn::Gate::ry(0.3 + 0.01 * q, q));
    }
    for (int q = 0; q + 1 < num_qubits; ++q) {
        circuit.gates.push_back(dqbn::Gate::cnot(q, q + 1));
    }
    for (int q = 0; q < num_qubits; ++q) {
        circuit.gates.push_back(dqbn::Gate::ry(-0.2 - 0.01 * q, q));
    }
    return circuit;
}

double time_run(const dqbn::Circuit& circuit, dqbn::ExecutionPolicy policy, int repeats) {
    using clock = std::chrono::steady_clock;
    double best = 1e30;
    for (int r = 0; r < repeats; ++r) {
        auto start = clock::now();
        dqbn::StateVector state = dqbn::simulate(circuit, policy);
        auto stop = clock::now();
        // Touch the result so the run cannot be optimized away.
        volatile double sink = state.probability(0);
        (void)sink;
        double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        if (ms < best) best = ms;
    }
    return best;
}

}  // namespace

int main() {
    std::printf("%-8s %-12s %-12s %-8s\n", "qubits", "serial_ms", "openmp_ms", "speedup");
    for (int qubits = 10; qubits <= 22; qubits += 2) {
        dqbn::Circuit circuit = sweep_circuit(qubits);
        int repeats = qubits >= 20 ? 2 : 4;
        double serial = time_run(circuit, dqbn::ExecutionPolicy::Serial, repeats);
        double parallel = time_run(circuit, dqbn::ExecutionPolicy::Parallel, repeats);
        std::printf("%-8d %-12.3f %-12.3f %-8.2f\n", qubits, serial, parallel,
                    serial / parallel);
    }
    return 0;
}
