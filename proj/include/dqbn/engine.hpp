#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dqbn/bayes_net.hpp"
#include "dqbn/grover.hpp"
#include "dqbn/qsim.hpp"

namespace dqbn {

enum class Backend { Classical, QuantumExact, QuantumShots, QuantumNoisy };

// Stable names used by the CLI and the CSV report.
std::string backend_name(Backend backend);
Backend backend_from_name(const std::string& name);

// How many Grover iterations to run per step: either swept per step by
// exact simulation, or pinned to a fixed count.
struct KPolicy {
    enum class Mode { Select, Fixed };
    Mode mode = Mode::Select;
    int k_max = 6;
    int fixed_k = 3;
};

struct EngineConfig {
    std::vector<Backend> backends{Backend::Classical, Backend::QuantumShots};
    std::uint64_t shots = 8192;
    std::uint64_t seed = 0;
    KPolicy k_policy;
    NoiseConfig noise;                // quantum-noisy backend only
    bool transitional_shots = false;  // sample the transitional circuit instead of exact marginals
    bool require_full_evidence = true;
};

// A dynamic model: one static network per slice plus a Markov
// transition for every tracked state variable. Tracked variables must
// be roots of the static network so their priors can be swapped in
// every step; observation variables receive the evidence.
struct DqbnModel {
    DiscreteNetwork static_net;
    std::vector<TransitionModel> transitions;
    std::vector<std::string> tracked;
    std::vector<std::string> observations;

    const TransitionModel& transition(const std::string& variable) const;
};

struct EvidenceSequence {
    std::vector<Evidence> steps;
};

std::vector<Violation> validate_model(const DqbnModel& model);
std::vector<Violation> validate_evidence_sequence(const DqbnModel& model,
                                                  const EvidenceSequence& evidence,
                                                  bool require_full_evidence);

struct BackendStepRecord {
    std::map<std::string, Distribution> prior;      // per tracked variable, at step entry
    std::map<std::string, Distribution> posterior;  // after conditioning on the evidence
    int grover_iterations = -1;                     // -1 when no amplification ran
    std::uint64_t shots_used = 0;
    std::uint64_t good_shots = 0;
};

struct StepRecord {
    int step = 0;
    Evidence evidence;
    std::map<Backend, BackendStepRecord> backends;
};

struct TimelineResult {
    std::vector<StepRecord> steps;
    // Percent RMS of the state-0 prior+posterior series against the
    // classical backend, per backend and tracked variable.
    std::map<Backend, std::map<std::string, double>> rms;
};

// sqrt(mean((a - b)^2)) * 100.
double rms_error(const std::vector<double>& a, const std::vector<double>& b);

// Folds the two-phase update over all steps: infer the tracked
// posteriors from the evidence (Grover amplification on the sampling
// backends), then push each posterior through its transition to get
// the next priors. Every requested backend threads its own priors; the
// classical backend always runs as the reference.
TimelineResult run_timeline(const DqbnModel& model, const EvidenceSequence& evidence,
                            const EngineConfig& config);

}  // namespace dqbn
