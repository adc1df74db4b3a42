#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "dqbn/bayes_net.hpp"
#include "dqbn/compiler.hpp"
#include "dqbn/error.hpp"
#include "dqbn/qsim.hpp"
#include "dqbn/rng.hpp"

#include "oracle_helpers.hpp"

using namespace dqbn;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Amplitude index of one state of a block (qubits listed MSB first),
// all other qubits zero.
std::size_t block_index(const std::vector<int>& qubits, int state) {
    std::size_t index = 0;
    int width = static_cast<int>(qubits.size());
    for (int j = 0; j < width; ++j) {
        std::size_t bit = static_cast<std::size_t>((state >> (width - 1 - j)) & 1);
        index |= bit << qubits[static_cast<std::size_t>(j)];
    }
    return index;
}

// Amplitude index of a full assignment under a circuit layout, with
// every ancilla at zero.
std::size_t assignment_index(const Circuit& circuit,
                             const std::map<std::string, int>& assignment) {
    std::size_t index = 0;
    for (const auto& [name, state] : assignment) {
        index |= block_index(circuit.layout.block(name).qubits, state);
    }
    return index;
}

// Soundness of a compiled static network: the state vector carries the
// classical joint on node patterns, nothing on unused patterns, and
// the ancillas end in |0>.
void check_compiled_network(const DiscreteNetwork& net, double joint_tol = 1e-9) {
    Circuit circuit = compile_static_circuit(net);
    CHECK(circuit.all_basis());
    StateVector state = simulate(circuit);

    std::vector<std::map<std::string, int>> assignments;
    testutil::enumerate_assignments(net, assignments);
    for (const auto& assignment : assignments) {
        double expected = joint_probability(net, assignment);
        double got = state.probability(assignment_index(circuit, assignment));
        CHECK(std::abs(got - expected) < joint_tol);
    }

    std::size_t ancilla_mask = 0;
    for (int q : circuit.ancillas) ancilla_mask |= std::size_t{1} << q;
    double ancilla_zero_mass = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        if ((i & ancilla_mask) == 0) ancilla_zero_mass += state.probability(i);
    }
    CHECK(ancilla_zero_mass >= 1.0 - 1e-12);

    // Any pattern that does not decode to a state of every node must
    // carry (numerically) no probability.
    std::vector<bool> is_used(state.dimension(), false);
    for (const auto& assignment : assignments) {
        is_used[assignment_index(circuit, assignment)] = true;
    }
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        if (!is_used[i]) CHECK(state.probability(i) < 1e-9);
    }
}

void check_lowering_equivalence(const Gate& gate, int var_qubits, int pool_size) {
    std::vector<int> pool;
    for (int i = 0; i < pool_size; ++i) pool.push_back(var_qubits + i);
    std::vector<Gate> lowered = lower_multi_controlled(gate, pool);

    Circuit a;
    a.num_qubits = var_qubits + pool_size;
    a.gates = lowered;
    Circuit b;
    b.num_qubits = a.num_qubits;
    b.gates = {gate};

    for (const Gate& g : lowered) CHECK(g.is_basis());

    std::size_t pool_mask = 0;
    for (int q : pool) pool_mask |= std::size_t{1} << q;
    const std::size_t dim = std::size_t{1} << a.num_qubits;
    for (std::size_t j = 0; j < dim; ++j) {
        if ((j & pool_mask) != 0) continue;  // ancillas start in |0>
        testutil::Amplitudes va =
            testutil::apply_gates_naive(a, testutil::basis_state(a.num_qubits, j));
        testutil::Amplitudes vb =
            testutil::apply_gates_naive(b, testutil::basis_state(b.num_qubits, j));
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(std::abs(va[i] - vb[i]) < 1e-10);
        }
    }
}

}  // namespace

TEST_CASE("qubit_count") {
    CHECK(qubit_count(2) == 1);
    CHECK(qubit_count(3) == 2);
    CHECK(qubit_count(4) == 2);
    CHECK(qubit_count(5) == 3);
    CHECK(qubit_count(8) == 3);
    CHECK(qubit_count(9) == 4);
    CHECK_THROWS_AS(qubit_count(1), Error);
    CHECK_THROWS_AS(qubit_count(0), Error);
}

TEST_CASE("rotation angles match the printed case-study values") {
    CHECK(rotation_angle(0.95, 0.05) == doctest::Approx(0.451).epsilon(1e-3));
    CHECK(rotation_angle(0.7, 0.3) == doctest::Approx(1.159).epsilon(1e-3));
    CHECK(rotation_angle(0.2, 0.5) == doctest::Approx(2.014).epsilon(1e-3));
    CHECK(rotation_angle(0.5, 0.0) == 0.0);
}

TEST_CASE("rotation angle definition and degenerate masses") {
    Rng rng(20240606);
    for (int trial = 0; trial < 200; ++trial) {
        double p0 = rng.uniform();
        double p1 = rng.uniform();
        double theta = rotation_angle(p0, p1);
        CHECK(theta == doctest::Approx(2.0 * std::atan2(std::sqrt(p1), std::sqrt(p0)))
                           .epsilon(1e-15));
        CHECK(theta >= 0.0);
        CHECK(theta <= kPi);
        // cos^2 / sin^2 of theta/2 reproduce the normalized masses.
        double total = p0 + p1;
        CHECK(std::cos(theta / 2) * std::cos(theta / 2) ==
              doctest::Approx(p0 / total).epsilon(1e-12));
    }
    CHECK(rotation_angle(0.0, 0.25) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK_THROWS_AS(rotation_angle(0.0, 0.0), Error);
    CHECK_THROWS_AS(rotation_angle(-0.1, 0.5), Error);
    CHECK_THROWS_AS(rotation_angle(std::nan(""), 0.5), Error);
}

TEST_CASE("encoding a three-state distribution emits the documented gates") {
    Distribution dist{0.2, 0.5, 0.3};
    std::vector<Gate> gates = encode_distribution(dist, {0, 1});
    REQUIRE(gates.size() == 3);

    CHECK(gates[0].kind == GateKind::Ry);
    CHECK(gates[0].target == 0);
    CHECK(gates[0].angle == doctest::Approx(1.159).epsilon(1e-3));

    // |1> branch first: states {2, padded 3} leave the trailing qubit
    // at zero, so the conditioned rotation is zero but still emitted.
    CHECK(gates[1].kind == GateKind::ControlledRy);
    CHECK(gates[1].target == 1);
    CHECK(gates[1].angle == 0.0);
    CHECK(gates[1].controls == std::vector<ControlBit>{{0, 1}});

    CHECK(gates[2].kind == GateKind::ControlledRy);
    CHECK(gates[2].target == 1);
    CHECK(gates[2].angle == doctest::Approx(2.014).epsilon(1e-3));
    CHECK(gates[2].controls == std::vector<ControlBit>{{0, 0}});
}

TEST_CASE("encoding the uniform four-state distribution") {
    Distribution dist{0.25, 0.25, 0.25, 0.25};
    std::vector<Gate> gates = encode_distribution(dist, {0, 1});
    REQUIRE(gates.size() == 3);
    for (const Gate& g : gates) CHECK(g.angle == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("degenerate encodes") {
    // A single-state distribution needs no gates and no qubits.
    CHECK(encode_distribution(Distribution{1.0}, {}).empty());

    // Capacity must match the block width.
    CHECK_THROWS_AS(encode_distribution(Distribution{0.2, 0.3, 0.5}, {0}), Error);
    CHECK_THROWS_AS(encode_distribution(Distribution{0.5, 0.5}, {0, 1}), Error);
    CHECK_THROWS_AS(encode_distribution(Distribution{0.5, -0.5}, {0}), Error);
}

TEST_CASE("encoded blocks reproduce their distribution") {
    Rng rng(20240607);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 7.0) % 7;  // 2..8 states
        Distribution dist = testutil::random_distribution(rng, n, 0.25);
        int width = qubit_count(n);
        std::vector<int> block;
        for (int q = 0; q < width; ++q) block.push_back(q);

        Circuit circuit;
        circuit.num_qubits = width;
        circuit.gates = encode_distribution(dist, block);
        Circuit lowered = lower_circuit(circuit);
        StateVector state = simulate(lowered);

        for (int s = 0; s < n; ++s) {
            CHECK(std::abs(state.probability(block_index(block, s)) - dist[s]) < 1e-12);
        }
        for (int s = n; s < (1 << width); ++s) {
            CHECK(state.probability(block_index(block, s)) < 1e-12);
        }
    }
}

TEST_CASE("conditioned encodes fire only on their control pattern") {
    Distribution dist{0.1, 0.6, 0.3};
    std::vector<Gate> gates = encode_distribution(dist, {1, 2}, {{0, 1}});
    for (const Gate& g : gates) {
        REQUIRE_FALSE(g.controls.empty());
        CHECK(g.controls.front() == ControlBit{0, 1});
    }

    // Control satisfied: block carries the distribution.
    Circuit fire;
    fire.num_qubits = 3;
    fire.gates.push_back(Gate::x(0));
    fire.gates.insert(fire.gates.end(), gates.begin(), gates.end());
    StateVector on = simulate(lower_circuit(fire));
    for (int s = 0; s < 3; ++s) {
        std::size_t index = block_index({1, 2}, s) | 1;  // control qubit set
        CHECK(on.probability(index) == doctest::Approx(dist[s]).epsilon(1e-12));
    }

    // Control unsatisfied: block stays |00>.
    Circuit idle;
    idle.num_qubits = 3;
    idle.gates = gates;
    StateVector off = simulate(lower_circuit(idle));
    CHECK(off.probability(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("static IR of the case-study network") {
    DqbnModel model = testutil::case_study_model();
    Circuit ir = compile_static_ir(model.static_net);

    CHECK(ir.num_qubits == 5);
    CHECK(ir.layout.block("d").qubits == std::vector<int>{0});
    CHECK(ir.layout.block("X").qubits == std::vector<int>{1, 2});
    CHECK(ir.layout.block("Y").qubits == std::vector<int>{3, 4});
    CHECK(ir.layout.block("Y").num_states == 3);

    // d: one rotation; X: one rotation + two conditioned; Y: one block
    // of three gates per parent-qubit pattern (2^3 patterns, dead ones
    // included).
    REQUIRE(ir.gates.size() == 1 + 3 + 8 * 3);

    std::size_t four_control = 0;
    std::size_t three_control = 0;
    for (const Gate& g : ir.gates) {
        if (g.kind != GateKind::ControlledRy) continue;
        if (g.controls.size() == 4) ++four_control;
        if (g.controls.size() == 3) ++three_control;
    }
    CHECK(four_control == 16);  // trailing Y qubit: parents plus own leading qubit
    CHECK(three_control == 8);  // leading Y qubit: parent qubits only

    // Blocks conditioned on the dead X pattern |11> carry zero angles.
    for (const Gate& g : ir.gates) {
        bool x1 = false;
        bool x2 = false;
        for (const ControlBit& c : g.controls) {
            if (c.qubit == 1 && c.value == 1) x1 = true;
            if (c.qubit == 2 && c.value == 1) x2 = true;
        }
        if (x1 && x2) CHECK(g.angle == 0.0);
    }
}

TEST_CASE("gate structure depends only on the network shape") {
    Rng rng(20240608);
    for (int trial = 0; trial < 25; ++trial) {
        DiscreteNetwork net = testutil::random_network(rng);
        DiscreteNetwork other = net;
        for (NodeSpec& node : other.nodes) {
            for (auto& row : node.cpt) row = testutil::random_prob_row(rng, node.num_states, 0.3);
        }
        Circuit a = compile_static_ir(net);
        Circuit b = compile_static_ir(other);
        REQUIRE(a.gates.size() == b.gates.size());
        for (std::size_t i = 0; i < a.gates.size(); ++i) {
            CHECK(a.gates[i].kind == b.gates[i].kind);
            CHECK(a.gates[i].target == b.gates[i].target);
            CHECK(a.gates[i].controls == b.gates[i].controls);
        }
    }
}

TEST_CASE("compiled case-study circuit is sound and uses eight qubits") {
    DqbnModel model = testutil::case_study_model();
    Circuit circuit = compile_static_circuit(model.static_net);
    CHECK(circuit.num_qubits == 8);
    CHECK(circuit.ancillas == std::vector<int>{5, 6, 7});
    check_compiled_network(model.static_net);
}

TEST_CASE("compiled random networks are sound") {
    Rng rng(20240609);
    for (int trial = 0; trial < 50; ++trial) {
        check_compiled_network(testutil::random_network(rng));
    }
}

TEST_CASE("single-control lowering uses the half-angle identity") {
    Gate gate = Gate::controlled_ry(0.8, {{0, 1}}, 1);
    std::vector<Gate> lowered = lower_multi_controlled(gate, {});
    REQUIRE(lowered.size() == 4);
    CHECK(lowered[0].kind == GateKind::Ry);
    CHECK(lowered[0].angle == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(lowered[1].kind == GateKind::Cnot);
    CHECK(lowered[2].kind == GateKind::Ry);
    CHECK(lowered[2].angle == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(lowered[3].kind == GateKind::Cnot);
    check_lowering_equivalence(gate, 2, 0);
}

TEST_CASE("zero-polarity controls are conjugated with X") {
    Gate gate = Gate::controlled_ry(0.8, {{0, 0}}, 1);
    std::vector<Gate> lowered = lower_multi_controlled(gate, {});
    REQUIRE(lowered.size() == 6);
    CHECK(lowered.front().kind == GateKind::X);
    CHECK(lowered.front().target == 0);
    CHECK(lowered.back().kind == GateKind::X);
    CHECK(lowered.back().target == 0);
    check_lowering_equivalence(gate, 2, 0);
}

TEST_CASE("multi-controlled lowering is unitarily equivalent") {
    check_lowering_equivalence(Gate::controlled_ry(1.1, {{0, 1}, {1, 1}}, 2), 3, 1);
    check_lowering_equivalence(Gate::controlled_ry(-0.7, {{0, 1}, {1, 0}}, 2), 3, 1);
    check_lowering_equivalence(Gate::controlled_ry(0.5, {{0, 1}, {1, 1}, {2, 0}}, 3), 4, 2);
    check_lowering_equivalence(Gate::controlled_ry(2.2, {{0, 0}, {1, 0}, {2, 1}}, 3), 4, 2);
    // The case-study shape: four controls, three ancillas.
    check_lowering_equivalence(
        Gate::controlled_ry(0.9, {{0, 1}, {1, 0}, {2, 1}, {3, 1}}, 4), 5, 3);
}

TEST_CASE("two-control lowering returns its ancilla on all four patterns") {
    Gate gate = Gate::controlled_ry(1.3, {{0, 1}, {1, 1}}, 2);
    std::vector<Gate> lowered = lower_multi_controlled(gate, {3});
    Circuit circuit;
    circuit.num_qubits = 4;
    circuit.gates = lowered;
    for (std::size_t pattern = 0; pattern < 4; ++pattern) {
        testutil::Amplitudes v =
            testutil::apply_gates_naive(circuit, testutil::basis_state(4, pattern));
        // No amplitude may remain where the ancilla (qubit 3) is set.
        for (std::size_t i = 8; i < 16; ++i) CHECK(std::abs(v[i]) < 1e-12);
    }
}

TEST_CASE("lowering fails without enough ancillas") {
    Gate gate = Gate::controlled_ry(0.4, {{0, 1}, {1, 1}, {2, 1}}, 3);
    CHECK_THROWS_AS(lower_multi_controlled(gate, {4}), Error);
}

TEST_CASE("the two-control AND block is self-inverse") {
    std::vector<Gate> gates;
    append_and_gate(gates, 0, 1, 2);
    Circuit once;
    once.num_qubits = 3;
    once.gates = gates;

    // Truth table on an ancilla-style |0> target.
    for (std::size_t c = 0; c < 4; ++c) {
        testutil::Amplitudes v =
            testutil::apply_gates_naive(once, testutil::basis_state(3, c));
        std::size_t expected = c == 3 ? 7 : c;
        CHECK(std::abs(std::abs(v[expected]) - 1.0) < 1e-12);
    }

    Circuit twice = once;
    twice.gates.insert(twice.gates.end(), gates.begin(), gates.end());
    for (std::size_t j = 0; j < 8; ++j) {
        testutil::Amplitudes v =
            testutil::apply_gates_naive(twice, testutil::basis_state(3, j));
        CHECK(std::abs(v[j] - std::complex<double>(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("lowered circuits stay small without multi-controlled gates") {
    Circuit circuit;
    circuit.num_qubits = 2;
    circuit.gates.push_back(Gate::ry(0.3, 0));
    circuit.gates.push_back(Gate::controlled_ry(0.4, {{0, 1}}, 1));
    Circuit lowered = lower_circuit(circuit);
    CHECK(lowered.num_qubits == 2);
    CHECK(lowered.ancillas.empty());
    CHECK(lowered.all_basis());
}

TEST_CASE("transitional circuit encodes posterior times transition column") {
    DqbnModel model = testutil::case_study_model();
    Distribution posterior{0.99650349650349657, 0.0034965034965034978};
    Circuit ir = compile_transitional_ir("d", posterior, model.transitions[0]);
    CHECK(ir.layout.block("d[t]").qubits == std::vector<int>{0});
    CHECK(ir.layout.block("d[t+1]").qubits == std::vector<int>{1});
    REQUIRE_FALSE(ir.gates.empty());
    CHECK(ir.gates[0].angle == doctest::Approx(0.1183).epsilon(1e-3));

    Circuit circuit = compile_transitional_circuit("d", posterior, model.transitions[0]);
    StateVector state = simulate(circuit);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            std::size_t index = block_index(ir.layout.block("d[t]").qubits, i) |
                                block_index(ir.layout.block("d[t+1]").qubits, j);
            CHECK(std::abs(state.probability(index) -
                           posterior[static_cast<std::size_t>(i)] *
                               model.transitions[0].matrix[static_cast<std::size_t>(j)]
                                                          [static_cast<std::size_t>(i)]) <
                  1e-12);
        }
    }
}

TEST_CASE("transitional circuits handle three-state variables") {
    TransitionModel cyclic{"v",
                           {{0.2, 0.0, 0.5}, {0.5, 0.7, 0.0}, {0.3, 0.3, 0.5}}};
    Distribution posterior{0.5, 0.2, 0.3};
    Circuit circuit = compile_transitional_circuit("v", posterior, cyclic);
    StateVector state = simulate(circuit);

    const NodeBlock& cur = circuit.layout.block("v[t]");
    const NodeBlock& next = circuit.layout.block("v[t+1]");
    double checked_mass = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            std::size_t index = block_index(cur.qubits, i) | block_index(next.qubits, j);
            double expected = posterior[static_cast<std::size_t>(i)] *
                              cyclic.matrix[static_cast<std::size_t>(j)]
                                           [static_cast<std::size_t>(i)];
            CHECK(std::abs(state.probability(index) - expected) < 1e-12);
            checked_mass += expected;
        }
    }
    CHECK(checked_mass == doctest::Approx(1.0).epsilon(1e-12));
}
