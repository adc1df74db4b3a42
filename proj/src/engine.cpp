#include "dqbn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dqbn/compiler.hpp"
#include "dqbn/error.hpp"
#include "dqbn/rng.hpp"

namespace dqbn {

namespace {

constexpr Backend kBackendOrder[] = {Backend::Classical, Backend::QuantumExact,
                                     Backend::QuantumShots, Backend::QuantumNoisy};

void throw_on_violations(const std::vector<Violation>& violations, ErrorCategory category) {
    if (violations.empty()) return;
    const Violation& v = violations.front();
    std::ostringstream msg;
    if (!v.node.empty()) msg << "'" << v.node << "': ";
    msg << v.message;
    throw Error(category, msg.str());
}

DiscreteNetwork substitute_priors(const DiscreteNetwork& net,
                                  const std::map<std::string, Distribution>& priors) {
    DiscreteNetwork out = net;
    for (const auto& [name, prior] : priors) {
        NodeSpec& node = out.nodes[static_cast<std::size_t>(out.node_index(name))];
        if (prior.size() != static_cast<std::size_t>(node.num_states)) {
            throw Error(ErrorCategory::Internal, "prior dimension drifted for '" + name + "'");
        }
        node.cpt[0] = prior.p;
    }
    return out;
}

GoodStateSpec build_spec(const Circuit& circuit, const DqbnModel& model,
                         const Evidence& evidence) {
    GoodStateSpec spec;
    for (const auto& [name, state] : evidence.assignments) {
        const NodeBlock& block = circuit.layout.block(name);
        int width = block.width();
        for (int j = 0; j < width; ++j) {
            spec.constraints[block.qubits[static_cast<std::size_t>(j)]] =
                (state >> (width - 1 - j)) & 1;
        }
    }
    for (int q : circuit.ancillas) spec.constraints[q] = 0;
    for (const std::string& var : model.tracked) {
        const NodeBlock& block = circuit.layout.block(var);
        spec.free_qubits.insert(spec.free_qubits.end(), block.qubits.begin(),
                                block.qubits.end());
    }
    return spec;
}

std::uint64_t count_good(const ShotCounts& counts, const GoodStateSpec& spec) {
    std::uint64_t good = 0;
    for (const auto& [index, count] : counts.counts) {
        if (spec.matches(index)) good += count;
    }
    return good;
}

int pick_iterations(const Circuit& a, const GoodStateSpec& spec, const KPolicy& policy) {
    if (policy.mode == KPolicy::Mode::Fixed) {
        if (policy.fixed_k < 0) {
            throw Error(ErrorCategory::Validation, "fixed k must be nonnegative");
        }
        return policy.fixed_k;
    }
    if (policy.k_max < 0) {
        throw Error(ErrorCategory::Validation, "k_max must be nonnegative");
    }
    return select_iterations(a, spec, policy.k_max).best_k;
}

// Distribution of a node block read off a state or counts, truncated to
// the states the block encodes (dead patterns carry no mass exactly,
// and are discarded under sampling).
Distribution block_distribution_from_state(const StateVector& state, const NodeBlock& block) {
    Distribution marginal = marginal_probabilities(state, block.qubits);
    Distribution dist;
    dist.p.assign(marginal.p.begin(), marginal.p.begin() + block.num_states);
    dist.normalize();
    return dist;
}

Distribution block_distribution_from_counts(const ShotCounts& counts, const NodeBlock& block) {
    GoodStateSpec unconstrained;
    QubitLayout layout;
    layout.blocks.emplace("value", block);
    return posterior_from_counts(counts, unconstrained, layout, "value");
}

}  // namespace

std::string backend_name(Backend backend) {
    switch (backend) {
        case Backend::Classical: return "classical";
        case Backend::QuantumExact: return "quantum-exact";
        case Backend::QuantumShots: return "quantum-shots";
        case Backend::QuantumNoisy: return "quantum-noisy";
    }
    return "classical";
}

Backend backend_from_name(const std::string& name) {
    if (name == "classical" || name == "classical-exact") return Backend::Classical;
    if (name == "quantum-exact") return Backend::QuantumExact;
    if (name == "quantum-shots") return Backend::QuantumShots;
    if (name == "quantum-noisy") return Backend::QuantumNoisy;
    throw Error(ErrorCategory::Usage, "unknown backend '" + name + "'");
}

const TransitionModel& DqbnModel::transition(const std::string& variable) const {
    for (const TransitionModel& t : transitions) {
        if (t.variable == variable) return t;
    }
    throw Error(ErrorCategory::Validation, "no transition model for '" + variable + "'");
}

std::vector<Violation> validate_model(const DqbnModel& model) {
    std::vector<Violation> out = validate_network(model.static_net);
    auto add = [&](const std::string& node, const std::string& rule, const std::string& msg) {
        out.push_back({node, rule, msg});
    };

    if (model.tracked.empty()) {
        add("", "tracked", "model tracks no state variable");
    }
    std::set<std::string> tracked_set;
    for (const std::string& name : model.tracked) {
        if (!tracked_set.insert(name).second) {
            add(name, "tracked", "variable tracked twice");
            continue;
        }
        if (!model.static_net.has_node(name)) {
            add(name, "tracked", "tracked variable is not a node");
            continue;
        }
        if (!model.static_net.node(name).parents.empty()) {
            add(name, "tracked",
                "tracked variable must be a root of the static network (its prior is "
                "replaced every step)");
        }
        int matches = 0;
        for (const TransitionModel& t : model.transitions) {
            if (t.variable == name) ++matches;
        }
        if (matches != 1) {
            add(name, "transition", "tracked variable needs exactly one transition model");
        }
    }
    for (const TransitionModel& t : model.transitions) {
        if (!tracked_set.count(t.variable)) {
            add(t.variable, "transition", "transition references an untracked variable");
        } else {
            auto violations = validate_transition(model.static_net, t);
            out.insert(out.end(), violations.begin(), violations.end());
        }
    }
    std::set<std::string> observation_set;
    for (const std::string& name : model.observations) {
        if (!observation_set.insert(name).second) {
            add(name, "observations", "variable observed twice");
            continue;
        }
        if (!model.static_net.has_node(name)) {
            add(name, "observations", "observation variable is not a node");
        }
        if (tracked_set.count(name)) {
            add(name, "observations", "variable cannot be both tracked and observed");
        }
    }
    return out;
}

std::vector<Violation> validate_evidence_sequence(const DqbnModel& model,
                                                  const EvidenceSequence& evidence,
                                                  bool require_full_evidence) {
    std::vector<Violation> out;
    std::set<std::string> observation_set(model.observations.begin(),
                                          model.observations.end());
    for (std::size_t s = 0; s < evidence.steps.size(); ++s) {
        const Evidence& step = evidence.steps[s];
        auto violations = validate_evidence(model.static_net, step);
        for (Violation& v : violations) {
            v.message = "step " + std::to_string(s) + ": " + v.message;
            out.push_back(v);
        }
        for (const auto& [name, state] : step.assignments) {
            (void)state;
            if (!observation_set.count(name)) {
                out.push_back({name, "evidence",
                               "step " + std::to_string(s) +
                                   ": evidence on a non-observation variable"});
            }
        }
        if (require_full_evidence) {
            for (const std::string& name : model.observations) {
                if (!step.contains(name)) {
                    out.push_back({name, "evidence",
                                   "step " + std::to_string(s) +
                                       ": missing evidence for observation variable"});
                }
            }
        }
    }
    return out;
}

double rms_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCategory::Validation, "RMS series lengths differ");
    }
    if (a.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size())) * 100.0;
}

TimelineResult run_timeline(const DqbnModel& model, const EvidenceSequence& evidence,
                            const EngineConfig& config) {
    throw_on_violations(validate_model(model), ErrorCategory::Validation);
    throw_on_violations(
        validate_evidence_sequence(model, evidence, config.require_full_evidence),
        ErrorCategory::Validation);
    if (evidence.steps.empty()) {
        throw Error(ErrorCategory::Validation, "evidence sequence has no steps");
    }
    if (config.backends.empty()) {
        throw Error(ErrorCategory::Usage, "no backends requested");
    }
    if ((std::count(config.backends.begin(), config.backends.end(), Backend::QuantumShots) ||
         std::count(config.backends.begin(), config.backends.end(), Backend::QuantumNoisy)) &&
        config.shots == 0) {
        throw Error(ErrorCategory::Validation, "sampling backends need at least one shot");
    }

    // The classical backend always runs: it is the reference every RMS
    // summary is measured against.
    std::set<Backend> active(config.backends.begin(), config.backends.end());
    active.insert(Backend::Classical);

    std::map<Backend, std::map<std::string, Distribution>> priors;
    for (Backend b : active) {
        for (const std::string& var : model.tracked) {
            priors[b][var] = Distribution(model.static_net.node(var).cpt[0]);
        }
    }

    TimelineResult result;
    for (std::size_t s = 0; s < evidence.steps.size(); ++s) {
        const Evidence& step_evidence = evidence.steps[s];
        StepRecord record;
        record.step = static_cast<int>(s);
        record.evidence = step_evidence;

        for (Backend b : kBackendOrder) {
            if (!active.count(b)) continue;
            BackendStepRecord out;
            out.prior = priors[b];
            DiscreteNetwork net = substitute_priors(model.static_net, priors[b]);

            if (b == Backend::Classical) {
                for (const std::string& var : model.tracked) {
                    out.posterior[var] = exact_posterior(net, var, step_evidence);
                    priors[b][var] =
                        propagate_transition(out.posterior[var], model.transition(var));
                }
                record.backends.emplace(b, std::move(out));
                continue;
            }

            Circuit a = compile_static_circuit(net);
            GoodStateSpec spec = build_spec(a, model, step_evidence);
            std::uint64_t step_seed =
                derive_seed(config.seed, s, static_cast<std::uint64_t>(b));

            if (b == Backend::QuantumExact) {
                StateVector state = simulate(a);
                for (const std::string& var : model.tracked) {
                    out.posterior[var] = posterior_from_state(state, spec, a.layout, var);
                }
            } else {
                GroverPlan plan{a, spec, pick_iterations(a, spec, config.k_policy)};
                out.grover_iterations = plan.iterations;

                // A single readout entry means one uniform flip
                // probability for however many qubits the circuit has.
                NoiseConfig noise = config.noise;
                if (noise.readout_flip.size() == 1 && a.num_qubits > 1) {
                    noise.readout_flip.assign(static_cast<std::size_t>(a.num_qubits),
                                              noise.readout_flip[0]);
                }

                // One retry with doubled shots if no shot survived the
                // post-selection filter, then give up.
                StateVector amplified;
                if (b == Backend::QuantumShots) amplified = grover_apply(plan);
                std::uint64_t shots = config.shots;
                ShotCounts counts;
                for (int attempt = 0;; ++attempt) {
                    std::uint64_t attempt_seed =
                        derive_seed(step_seed, static_cast<std::uint64_t>(attempt));
                    counts = b == Backend::QuantumShots
                                 ? sample(amplified, shots, attempt_seed)
                                 : grover_counts_noisy(plan, noise, shots, attempt_seed);
                    out.shots_used = shots;
                    out.good_shots = count_good(counts, spec);
                    if (out.good_shots > 0) break;
                    if (attempt == 1) {
                        throw Error(ErrorCategory::Inference,
                                    "no good-state samples at step " + std::to_string(s) +
                                        " (retried with doubled shots)");
                    }
                    shots *= 2;
                }
                for (const std::string& var : model.tracked) {
                    out.posterior[var] = posterior_from_counts(counts, spec, a.layout, var);
                }
            }

            // Transitional step: simulate the two-slice circuit and read
            // the next prior off the t+1 block.
            for (const std::string& var : model.tracked) {
                Circuit transitional = compile_transitional_circuit(
                    var, out.posterior[var], model.transition(var));
                const NodeBlock& next_block = transitional.layout.block(var + "[t+1]");
                if (config.transitional_shots) {
                    std::size_t var_index = static_cast<std::size_t>(
                        std::find(model.tracked.begin(), model.tracked.end(), var) -
                        model.tracked.begin());
                    ShotCounts counts =
                        sample(simulate(transitional), config.shots,
                               derive_seed(step_seed, 100 + var_index));
                    priors[b][var] = block_distribution_from_counts(counts, next_block);
                } else {
                    priors[b][var] =
                        block_distribution_from_state(simulate(transitional), next_block);
                }
            }
            record.backends.emplace(b, std::move(out));
        }
        result.steps.push_back(std::move(record));
    }

    // RMS of the state-0 prior+posterior series against classical.
    for (Backend b : kBackendOrder) {
        if (b == Backend::Classical || !active.count(b)) continue;
        for (const std::string& var : model.tracked) {
            std::vector<double> ours;
            std::vector<double> reference;
            for (const StepRecord& record : result.steps) {
                ours.push_back(record.backends.at(b).prior.at(var)[0]);
                reference.push_back(record.backends.at(Backend::Classical).prior.at(var)[0]);
            }
            for (const StepRecord& record : result.steps) {
                ours.push_back(record.backends.at(b).posterior.at(var)[0]);
                reference.push_back(
                    record.backends.at(Backend::Classical).posterior.at(var)[0]);
            }
            result.rms[b][var] = rms_error(ours, reference);
        }
    }
    return result;
}

}  // namespace dqbn
