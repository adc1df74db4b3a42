// Acceptance gate: one pass/fail line per shipping criterion, exit 0
// only when every criterion holds. Tolerances are pinned here on
// purpose; loosening them is a release decision, not a test fix.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dqbn/bayes_net.hpp"
#include "dqbn/circuit.hpp"
#include "dqbn/compiler.hpp"
#include "dqbn/engine.hpp"
#include "dqbn/grover.hpp"
#include "dqbn/qsim.hpp"
#include "dqbn/rng.hpp"

#include "oracle_helpers.hpp"

using namespace dqbn;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void constrain_block(GoodStateSpec& spec, const NodeBlock& block, int state) {
    int width = static_cast<int>(block.qubits.size());
    for (int j = 0; j < width; ++j) {
        spec.constraints[block.qubits[j]] = (state >> (width - 1 - j)) & 1;
    }
}

GoodStateSpec evidence_spec(const Circuit& circuit, const DqbnModel& model,
                            const Evidence& evidence) {
    GoodStateSpec spec;
    for (const auto& [name, state] : evidence.assignments) {
        constrain_block(spec, circuit.layout.block(name), state);
    }
    for (int q : circuit.ancillas) spec.constraints[q] = 0;
    for (const std::string& var : model.tracked) {
        const NodeBlock& block = circuit.layout.block(var);
        spec.free_qubits.insert(spec.free_qubits.end(), block.qubits.begin(),
                                block.qubits.end());
    }
    return spec;
}

std::size_t assignment_state_index(const Circuit& circuit, const DiscreteNetwork& net,
                                   const std::map<std::string, int>& assignment) {
    std::size_t index = 0;
    for (const NodeSpec& node : net.nodes) {
        const NodeBlock& block = circuit.layout.block(node.name);
        int width = static_cast<int>(block.qubits.size());
        int state = assignment.at(node.name);
        for (int j = 0; j < width; ++j) {
            std::size_t bit = static_cast<std::size_t>((state >> (width - 1 - j)) & 1);
            index |= bit << block.qubits[j];
        }
    }
    return index;
}

double chain_rule_joint(const DiscreteNetwork& net,
                         const std::map<std::string, int>& assignment) {
    double joint = 1.0;
    for (const NodeSpec& node : net.nodes) {
        std::size_t row = 0;
        for (const std::string& parent : node.parents) {
            row = row * static_cast<std::size_t>(net.node(parent).num_states) +
                  static_cast<std::size_t>(assignment.at(parent));
        }
        joint *= node.cpt[row][static_cast<std::size_t>(assignment.at(node.name))];
    }
    return joint;
}

// Encoded state must carry the classical joint on the variable blocks,
// keep ancillas at zero, and leave dead block patterns empty.
bool network_encodes_joint(const DiscreteNetwork& net, std::string& detail) {
    Circuit circuit = compile_static_circuit(net);
    StateVector state = simulate(circuit);

    std::size_t ancilla_mask = 0;
    for (int q : circuit.ancillas) ancilla_mask |= std::size_t{1} << q;

    double checked_mass = 0.0;
    std::vector<bool> seen(state.dimension(), false);
    bool ok = true;
    std::vector<std::map<std::string, int>> assignments;
    testutil::enumerate_assignments(net, assignments);
    for (const auto& assignment : assignments) {
        std::size_t index = assignment_state_index(circuit, net, assignment);
        seen[index] = true;
        double expected = chain_rule_joint(net, assignment);
        double got = state.probability(index);
        checked_mass += got;
        if (std::abs(got - expected) > 1e-9) {
            ok = false;
            detail = "joint mismatch at a basis state: got " + std::to_string(got) +
                     ", want " + std::to_string(expected);
        }
    }
    for (std::size_t index = 0; index < state.dimension(); ++index) {
        if (seen[index]) continue;
        double stray = state.probability(index);
        if ((index & ancilla_mask) != 0) {
            if (stray > 1e-12) {
                ok = false;
                detail = "ancilla qubits retained probability mass";
            }
        } else if (stray > 1e-9) {
            ok = false;
            detail = "dead block pattern carries probability mass";
        }
    }
    if (std::abs(checked_mass - 1.0) > 1e-9) {
        ok = false;
        detail = "encoded joint mass sums to " + std::to_string(checked_mass);
    }
    return ok;
}

// Random circuit/evidence pairs with a non-degenerate good mass.
std::vector<std::pair<Circuit, GoodStateSpec>> random_grover_cases(std::uint64_t seed,
                                                                   int count) {
    std::vector<std::pair<Circuit, GoodStateSpec>> cases;
    Rng rng(seed);
    while (static_cast<int>(cases.size()) < count) {
        DiscreteNetwork net = testutil::random_network(rng);
        if (net.nodes.size() < 2) continue;
        Circuit circuit = compile_static_circuit(net);
        GoodStateSpec spec;
        for (std::size_t i = 1; i < net.nodes.size(); ++i) {
            const NodeBlock& block = circuit.layout.block(net.nodes[i].name);
            int state = static_cast<int>(rng.uniform() * net.nodes[i].num_states) %
                        net.nodes[i].num_states;
            constrain_block(spec, block, state);
        }
        for (int q : circuit.ancillas) spec.constraints[q] = 0;
        spec.free_qubits = circuit.layout.block(net.nodes[0].name).qubits;
        double a = good_mass(simulate(circuit), spec);
        if (a < 1e-6 || a > 1.0 - 1e-6) continue;
        cases.emplace_back(std::move(circuit), spec);
    }
    return cases;
}

bool criterion_encode_angles(std::string& detail) {
    struct Pin {
        double p0, p1, expected;
    };
    // Case-study rotations: the machine prior, the two X-block splits,
    // and the transitional encode of the step-0 posterior (285/286).
    const Pin pins[] = {
        {0.95, 0.05, 0.4510},
        {0.7, 0.3, 1.1593},
        {0.2, 0.5, 2.0137},
        {285.0 / 286.0, 1.0 / 286.0, 0.1183},
    };
    for (const Pin& pin : pins) {
        double got = rotation_angle(pin.p0, pin.p1);
        if (std::abs(got - pin.expected) > 1e-3) {
            char buffer[128];
            std::snprintf(buffer, sizeof(buffer),
                          "rotation_angle(%.6f, %.6f) = %.6f, want %.4f", pin.p0, pin.p1,
                          got, pin.expected);
            detail = buffer;
            return false;
        }
    }
    detail = "four case-study rotations within 1e-3";
    return true;
}

bool criterion_circuit_soundness(std::string& detail) {
    auto start = std::chrono::steady_clock::now();
    if (!network_encodes_joint(testutil::case_study_model().static_net, detail)) {
        return false;
    }
    Rng rng(424201);
    for (int trial = 0; trial < 200; ++trial) {
        DiscreteNetwork net = testutil::random_network(rng);
        if (!network_encodes_joint(net, detail)) {
            detail += " (random network trial " + std::to_string(trial) + ")";
            return false;
        }
    }
    double elapsed = seconds_since(start);
    if (elapsed > 30.0) {
        detail = "soundness sweep took " + std::to_string(elapsed) + "s (budget 30s)";
        return false;
    }
    char buffer[128];
    std::snprintf(buffer, sizeof(buffer),
                  "case study + 200 random networks encode their joint (%.1fs)", elapsed);
    detail = buffer;
    return true;
}

bool criterion_rotation_law(std::string& detail) {
    auto start = std::chrono::steady_clock::now();
    for (const auto& [circuit, spec] : random_grover_cases(424202, 100)) {
        double a = good_mass(simulate(circuit), spec);
        double theta = std::asin(std::sqrt(a));
        for (int k = 0; k <= 5; ++k) {
            double amplified = good_mass(grover_apply(GroverPlan{circuit, spec, k}), spec);
            double expected = std::sin((2 * k + 1) * theta);
            expected *= expected;
            if (std::abs(amplified - expected) > 1e-9) {
                char buffer[128];
                std::snprintf(buffer, sizeof(buffer),
                              "good mass %.12f != sin^2 law %.12f at k=%d", amplified,
                              expected, k);
                detail = buffer;
                return false;
            }
        }
    }

    // The case-study sweep at the second evidence step must land on
    // three rounds.
    DqbnModel model = testutil::case_study_model();
    EngineConfig classical;
    classical.backends = {Backend::Classical};
    TimelineResult timeline =
        run_timeline(model, testutil::case_study_evidence(), classical);
    DiscreteNetwork net = model.static_net;
    net.nodes[0].cpt[0] =
        timeline.steps[1].backends.at(Backend::Classical).prior.at("d").p;
    Circuit circuit = compile_static_circuit(net);
    GoodStateSpec spec =
        evidence_spec(circuit, model, testutil::case_study_evidence().steps[1]);
    IterationSweep sweep = select_iterations(circuit, spec, 5);
    if (sweep.best_k != 3) {
        detail = "case-study step 1 selected k=" + std::to_string(sweep.best_k) +
                 ", want 3";
        return false;
    }
    double elapsed = seconds_since(start);
    if (elapsed > 30.0) {
        detail = "rotation-law sweep took " + std::to_string(elapsed) + "s (budget 30s)";
        return false;
    }
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer),
                  "sin^2((2k+1) asin sqrt(a)) holds for 100 cases, k<=5; step-1 sweep "
                  "selects k=3 (%.1fs)",
                  elapsed);
    detail = buffer;
    return true;
}

bool criterion_ratio_preservation(std::string& detail) {
    for (const auto& [circuit, spec] : random_grover_cases(424203, 100)) {
        StateVector initial = simulate(circuit);
        StateVector amplified =
            grover_apply(GroverPlan{circuit, spec, 1 + static_cast<int>(circuit.gates.size()) % 5});
        std::vector<std::size_t> good;
        for (std::size_t idx = 0; idx < initial.dimension(); ++idx) {
            if (spec.matches(idx) && std::abs(initial.amplitudes[idx]) > 1e-12) {
                good.push_back(idx);
            }
        }
        for (std::size_t i = 1; i < good.size(); ++i) {
            double cross = std::abs(amplified.amplitudes[good[i]] * initial.amplitudes[good[0]] -
                                    amplified.amplitudes[good[0]] * initial.amplitudes[good[i]]);
            if (cross > 1e-10) {
                detail = "good-state amplitude ratio drifted by " + std::to_string(cross);
                return false;
            }
        }
    }
    detail = "good-state ratios preserved to 1e-10 across 100 cases";
    return true;
}

bool criterion_timeline_accuracy(std::string& detail) {
    auto start = std::chrono::steady_clock::now();
    DqbnModel model = testutil::case_study_model();
    EvidenceSequence evidence = testutil::case_study_evidence();

    EngineConfig config;
    config.backends = {Backend::QuantumShots};
    config.shots = 8192;
    config.seed = 7;
    double pinned = run_timeline(model, evidence, config).rms.at(Backend::QuantumShots).at("d");
    if (!(pinned <= 3.0)) {
        detail = "seed-7 RMS " + std::to_string(pinned) + "% exceeds 3%";
        return false;
    }

    std::vector<double> rms;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        config.seed = seed;
        rms.push_back(run_timeline(model, evidence, config).rms.at(Backend::QuantumShots).at("d"));
    }
    std::sort(rms.begin(), rms.end());
    double median = 0.5 * (rms[9] + rms[10]);
    double elapsed = seconds_since(start);
    if (!(median <= 2.0)) {
        detail = "median RMS over 20 seeds is " + std::to_string(median) + "%, budget 2%";
        return false;
    }
    if (elapsed > 60.0) {
        detail = "timeline sweep took " + std::to_string(elapsed) + "s (budget 60s)";
        return false;
    }
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer),
                  "seed-7 RMS %.3f%% (<=3%%), median over 20 seeds %.3f%% (<=2%%) at 8192 "
                  "shots (%.1fs)",
                  pinned, median, elapsed);
    detail = buffer;
    return true;
}

bool criterion_degradation_dynamics(std::string& detail) {
    DqbnModel model = testutil::case_study_model();
    EngineConfig config;
    config.backends = {Backend::Classical};
    TimelineResult result = run_timeline(model, testutil::case_study_evidence(), config);

    for (std::size_t s = 0; s + 1 < result.steps.size(); ++s) {
        const BackendStepRecord& here = result.steps[s].backends.at(Backend::Classical);
        const BackendStepRecord& next = result.steps[s + 1].backends.at(Backend::Classical);
        if (!(next.prior.at("d")[1] > here.prior.at("d")[1])) {
            detail = "degradation probability did not increase at step " + std::to_string(s);
            return false;
        }
        Distribution expected = propagate_transition(here.posterior.at("d"), model.transition("d"));
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (next.prior.at("d")[i] != expected[i]) {
                detail = "next prior is not exactly the propagated posterior";
                return false;
            }
        }
    }

    DqbnModel absorbed = model;
    absorbed.static_net.nodes[0].cpt[0] = {0.0, 1.0};
    TimelineResult held = run_timeline(absorbed, testutil::case_study_evidence(), config);
    for (const StepRecord& step : held.steps) {
        if (step.backends.at(Backend::Classical).prior.at("d")[1] != 1.0) {
            detail = "fully degraded prior leaked probability back";
            return false;
        }
    }
    detail = "P(Major) priors strictly increase, recursion exact, degraded state absorbing";
    return true;
}

bool criterion_noise_degrades(std::string& detail) {
    EngineConfig config;
    config.backends = {Backend::QuantumShots, Backend::QuantumNoisy};
    config.shots = 512;
    config.seed = 7;
    config.noise.depolarizing_2q = 0.02;
    TimelineResult result =
        run_timeline(testutil::case_study_model(), testutil::case_study_evidence(), config);
    double clean = result.rms.at(Backend::QuantumShots).at("d");
    double noisy = result.rms.at(Backend::QuantumNoisy).at("d");
    if (!(noisy > clean)) {
        detail = "noisy RMS " + std::to_string(noisy) + "% not above noiseless " +
                 std::to_string(clean) + "%";
        return false;
    }
    char buffer[128];
    std::snprintf(buffer, sizeof(buffer),
                  "p2=0.02 raises RMS from %.3f%% to %.3f%% at 512 shots", clean, noisy);
    detail = buffer;
    return true;
}

bool criterion_deterministic_artifacts(std::string& detail) {
    DiscreteNetwork net = testutil::case_study_model().static_net;
    Circuit first = compile_static_circuit(net);
    Circuit second = compile_static_circuit(net);
    if (emit_qasm(first) != emit_qasm(second)) {
        detail = "recompilation changed the QASM text";
        return false;
    }
    if (first.num_qubits != 8) {
        detail = "case-study circuit uses " + std::to_string(first.num_qubits) +
                 " qubits, want 8";
        return false;
    }
    if (first.ancillas != std::vector<int>{5, 6, 7}) {
        detail = "unexpected ancilla allocation";
        return false;
    }
    CircuitMetrics a = circuit_metrics(first);
    CircuitMetrics b = circuit_metrics(second);
    if (a.depth != b.depth || a.cnot_count != b.cnot_count ||
        a.total_gates != b.total_gates) {
        detail = "recompilation changed the circuit metrics";
        return false;
    }
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer),
                  "8 qubits (5 variable + 3 ancilla), stable metrics: depth %d, %zu CNOTs, "
                  "%zu gates",
                  a.depth, a.cnot_count, a.total_gates);
    detail = buffer;
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*check)(std::string&);
    };
    const Criterion criteria[] = {
        {"encode-angles", criterion_encode_angles},
        {"circuit-soundness", criterion_circuit_soundness},
        {"grover-rotation-law", criterion_rotation_law},
        {"ratio-preservation", criterion_ratio_preservation},
        {"timeline-accuracy", criterion_timeline_accuracy},
        {"degradation-dynamics", criterion_degradation_dynamics},
        {"noise-degrades", criterion_noise_degrades},
        {"deterministic-artifacts", criterion_deterministic_artifacts},
    };

    int failed = 0;
    for (const Criterion& criterion : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.check(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %-24s %s\n", ok ? "PASS" : "FAIL", criterion.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    if (failed == 0) {
        std::printf("acceptance: all %zu criteria passed\n",
                    sizeof(criteria) / sizeof(criteria[0]));
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failed);
    return 1;
}
