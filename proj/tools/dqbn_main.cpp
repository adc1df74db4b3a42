#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dqbn/circuit.hpp"
#include "dqbn/compiler.hpp"
#include "dqbn/engine.hpp"
#include "dqbn/error.hpp"
#include "dqbn/model_io.hpp"
#include "dqbn/report.hpp"

namespace {

using dqbn::Backend;
using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dqbn::Error(dqbn::ErrorCategory::Io, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw dqbn::Error(dqbn::ErrorCategory::Io, "failed reading '" + path + "'");
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw dqbn::Error(dqbn::ErrorCategory::Io, "cannot open '" + path + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) throw dqbn::Error(dqbn::ErrorCategory::Io, "failed writing '" + path + "'");
}

void emit_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        write_file(path, content);
    }
}

std::vector<Backend> parse_backends(const std::string& spec) {
    std::vector<Backend> out;
    std::stringstream stream(spec);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        Backend b = dqbn::backend_from_name(item);
        if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    }
    if (out.empty()) {
        throw dqbn::Error(dqbn::ErrorCategory::Usage, "no backends requested");
    }
    return out;
}

// Options shared by every subcommand that runs the engine.
struct EngineOpts {
    std::uint64_t shots = 8192;
    std::uint64_t seed = 0;
    int k_max = 6;
    int fixed_k = 3;
    bool use_fixed_k = false;
    double p1 = 0.0;
    double p2 = 0.0;
    double readout = 0.0;
    bool transitional_shots = false;
    bool partial_evidence = false;

    dqbn::EngineConfig config(std::vector<Backend> backends) const {
        dqbn::EngineConfig cfg;
        cfg.backends = std::move(backends);
        cfg.shots = shots;
        cfg.seed = seed;
        cfg.k_policy.mode =
            use_fixed_k ? dqbn::KPolicy::Mode::Fixed : dqbn::KPolicy::Mode::Select;
        cfg.k_policy.k_max = k_max;
        cfg.k_policy.fixed_k = fixed_k;
        cfg.noise.depolarizing_1q = p1;
        cfg.noise.depolarizing_2q = p2;
        if (readout > 0.0) cfg.noise.readout_flip = {readout};
        cfg.transitional_shots = transitional_shots;
        cfg.require_full_evidence = !partial_evidence;
        return cfg;
    }
};

void add_engine_options(CLI::App* cmd, EngineOpts& opts) {
    cmd->add_option("--shots", opts.shots, "Measurement shots per sampling backend")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Master RNG seed (env: DQBN_SEED)")
        ->envname("DQBN_SEED")
        ->capture_default_str();
    cmd->add_option("--k-max", opts.k_max,
                    "Largest Grover iteration count the per-step sweep may select")
        ->capture_default_str();
    cmd->add_option("--fixed-k", opts.fixed_k,
                    "Pin the Grover iteration count instead of sweeping per step")
        ->each([&opts](const std::string&) { opts.use_fixed_k = true; });
    cmd->add_option("--p1", opts.p1,
                    "Depolarizing probability after each single-qubit gate (quantum-noisy)")
        ->capture_default_str();
    cmd->add_option("--p2", opts.p2,
                    "Depolarizing probability after each multi-qubit gate (quantum-noisy)")
        ->capture_default_str();
    cmd->add_option("--readout", opts.readout,
                    "Uniform per-qubit readout flip probability (quantum-noisy)")
        ->capture_default_str();
    cmd->add_flag("--transitional-shots", opts.transitional_shots,
                  "Sample the transitional circuit instead of reading exact marginals");
    cmd->add_flag("--partial-evidence", opts.partial_evidence,
                  "Allow steps that leave some observation variables unobserved");
}

std::string describe_node(const dqbn::NodeSpec& node) {
    std::ostringstream out;
    out << node.name << ": " << node.num_states << " states";
    if (!node.parents.empty()) {
        out << " <- ";
        for (std::size_t i = 0; i < node.parents.size(); ++i) {
            if (i) out << ", ";
            out << node.parents[i];
        }
    }
    return out.str();
}

int run_validate(const std::string& model_path) {
    std::vector<std::string> violations;
    dqbn::ParsedModel parsed = dqbn::parse_model_report(read_file(model_path), violations);
    if (!violations.empty()) {
        std::cerr << "ERROR:validation: model has " << violations.size()
                  << " violation(s)\n";
        for (const std::string& line : violations) std::cerr << "  - " << line << '\n';
        return 1;
    }
    std::cout << "model: " << (parsed.name.empty() ? model_path : parsed.name) << '\n';
    std::cout << "nodes:\n";
    for (const dqbn::NodeSpec& node : parsed.model.static_net.nodes) {
        std::cout << "  " << describe_node(node) << '\n';
    }
    std::cout << "tracked:";
    for (const std::string& name : parsed.model.tracked) std::cout << ' ' << name;
    std::cout << "\nobservations:";
    for (const std::string& name : parsed.model.observations) std::cout << ' ' << name;
    std::cout << "\nevidence steps: " << parsed.evidence.steps.size() << '\n';
    std::cout << "ok\n";
    return 0;
}

// Classical prior/posterior state as of one evidence step, used to pin
// the rotation angles of exported circuits.
dqbn::BackendStepRecord classical_state_at(const dqbn::ParsedModel& parsed, int step) {
    if (step < 0 || step >= static_cast<int>(parsed.evidence.steps.size())) {
        throw dqbn::Error(dqbn::ErrorCategory::Usage,
                          "step " + std::to_string(step) + " out of range [0, " +
                              std::to_string(parsed.evidence.steps.size()) + ")");
    }
    dqbn::EvidenceSequence truncated;
    truncated.steps.assign(parsed.evidence.steps.begin(),
                           parsed.evidence.steps.begin() + step + 1);
    dqbn::EngineConfig cfg;
    cfg.backends = {Backend::Classical};
    dqbn::TimelineResult timeline = dqbn::run_timeline(parsed.model, truncated, cfg);
    return timeline.steps.back().backends.at(Backend::Classical);
}

struct CompileOpts {
    std::string model_path;
    int step = 0;
    bool transitional = false;
    std::string variable;
    std::string out;
    std::string metrics_out;
};

int run_compile(const CompileOpts& opts) {
    dqbn::ParsedModel parsed = dqbn::load_model(opts.model_path);
    dqbn::BackendStepRecord state = classical_state_at(parsed, opts.step);

    dqbn::Circuit circuit;
    std::string kind;
    if (opts.transitional) {
        kind = "transitional";
        std::string variable = opts.variable;
        if (variable.empty()) {
            if (parsed.model.tracked.size() != 1) {
                throw dqbn::Error(dqbn::ErrorCategory::Usage,
                                  "several tracked variables; pick one with --variable");
            }
            variable = parsed.model.tracked.front();
        }
        if (std::find(parsed.model.tracked.begin(), parsed.model.tracked.end(), variable) ==
            parsed.model.tracked.end()) {
            throw dqbn::Error(dqbn::ErrorCategory::Usage,
                              "'" + variable + "' is not a tracked variable");
        }
        circuit = dqbn::compile_transitional_circuit(variable, state.posterior.at(variable),
                                                     parsed.model.transition(variable));
    } else {
        kind = "static";
        dqbn::DiscreteNetwork net = parsed.model.static_net;
        for (const auto& [name, prior] : state.prior) {
            net.nodes[static_cast<std::size_t>(net.node_index(name))].cpt[0] = prior.p;
        }
        circuit = dqbn::compile_static_circuit(net);
    }

    write_file(opts.out, dqbn::emit_qasm(circuit));

    dqbn::CircuitMetrics metrics = dqbn::circuit_metrics(circuit);
    Json report = Json::object();
    report["circuit"] = kind;
    report["step"] = opts.step;
    report["qubits"] = metrics.qubits;
    report["depth"] = metrics.depth;
    report["total_gates"] = metrics.total_gates;
    report["cnot_count"] = metrics.cnot_count;
    report["ry_count"] = metrics.ry_count;
    report["x_count"] = metrics.x_count;
    report["ancillas"] = circuit.ancillas;
    emit_output(opts.metrics_out, report.dump(2) + "\n");
    return 0;
}

Json distribution_json(const dqbn::NodeSpec& node, const dqbn::Distribution& dist) {
    Json out = Json::object();
    for (int s = 0; s < node.num_states; ++s) {
        out[node.state_label(s)] = dist[static_cast<std::size_t>(s)];
    }
    return out;
}

struct InferOpts {
    std::string model_path;
    int step = 0;
    std::string backend = "quantum-shots";
    std::string out;
    EngineOpts engine;
};

int run_infer(const InferOpts& opts) {
    dqbn::ParsedModel parsed = dqbn::load_model(opts.model_path);
    Backend backend = dqbn::backend_from_name(opts.backend);
    if (opts.step < 0 || opts.step >= static_cast<int>(parsed.evidence.steps.size())) {
        throw dqbn::Error(dqbn::ErrorCategory::Usage,
                          "step " + std::to_string(opts.step) + " out of range [0, " +
                              std::to_string(parsed.evidence.steps.size()) + ")");
    }
    dqbn::EvidenceSequence truncated;
    truncated.steps.assign(parsed.evidence.steps.begin(),
                           parsed.evidence.steps.begin() + opts.step + 1);
    dqbn::TimelineResult timeline =
        dqbn::run_timeline(parsed.model, truncated, opts.engine.config({backend}));
    const dqbn::StepRecord& record = timeline.steps.back();
    const dqbn::BackendStepRecord& result = record.backends.at(backend);

    Json out = Json::object();
    out["step"] = opts.step;
    out["backend"] = dqbn::backend_name(backend);
    Json evidence = Json::object();
    for (const auto& [name, state] : record.evidence.assignments) {
        evidence[name] = parsed.model.static_net.node(name).state_label(state);
    }
    out["evidence"] = evidence;
    Json prior = Json::object();
    Json posterior = Json::object();
    for (const std::string& var : parsed.model.tracked) {
        const dqbn::NodeSpec& node = parsed.model.static_net.node(var);
        prior[var] = distribution_json(node, result.prior.at(var));
        posterior[var] = distribution_json(node, result.posterior.at(var));
    }
    out["prior"] = prior;
    out["posterior"] = posterior;
    if (result.grover_iterations >= 0) {
        out["grover_iterations"] = result.grover_iterations;
        out["shots_used"] = result.shots_used;
        out["good_shots"] = result.good_shots;
    }
    emit_output(opts.out, out.dump(2) + "\n");
    return 0;
}

struct RunOpts {
    std::string model_path;
    std::string backends = "classical,quantum-shots";
    std::string out;
    std::string svg;
    EngineOpts engine;
};

int run_run(const RunOpts& opts) {
    dqbn::ParsedModel parsed = dqbn::load_model(opts.model_path);
    std::vector<Backend> backends = parse_backends(opts.backends);
    dqbn::TimelineResult result =
        dqbn::run_timeline(parsed.model, parsed.evidence, opts.engine.config(backends));
    emit_output(opts.out, dqbn::timeline_csv(parsed.model, result, backends));
    if (!opts.svg.empty()) {
        write_file(opts.svg, dqbn::timeline_svg(parsed.model, result, backends));
    }
    return 0;
}

struct CompareOpts {
    std::string model_path;
    std::string backends = "classical,quantum-exact,quantum-shots";
    EngineOpts engine;
};

int run_compare(const CompareOpts& opts) {
    dqbn::ParsedModel parsed = dqbn::load_model(opts.model_path);
    std::vector<Backend> backends = parse_backends(opts.backends);
    dqbn::TimelineResult result =
        dqbn::run_timeline(parsed.model, parsed.evidence, opts.engine.config(backends));
    std::cout << std::left << std::setw(16) << "backend" << std::setw(12) << "variable"
              << "rms_percent\n";
    char buffer[64];
    for (Backend b : backends) {
        if (b == Backend::Classical) continue;
        for (const std::string& var : parsed.model.tracked) {
            std::snprintf(buffer, sizeof(buffer), "%.6f", result.rms.at(b).at(var));
            std::cout << std::left << std::setw(16) << dqbn::backend_name(b)
                      << std::setw(12) << var << buffer << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Discrete dynamic Bayesian networks compiled to quantum circuits, with "
        "Grover-amplified inference on a built-in state-vector simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dqbn 0.1.0");

    std::string validate_model_path;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Check a model file and print a summary");
    validate_cmd->add_option("--model", validate_model_path, "Model JSON file")->required();

    CompileOpts compile_opts;
    CLI::App* compile_cmd = app.add_subcommand(
        "compile", "Export a circuit as OpenQASM 2.0 plus a metrics report");
    compile_cmd->add_option("--model", compile_opts.model_path, "Model JSON file")->required();
    compile_cmd->add_option("--step", compile_opts.step,
                            "Evidence step whose (classical) priors pin the rotation angles")
        ->capture_default_str();
    compile_cmd->add_flag("--transitional", compile_opts.transitional,
                          "Export the two-slice transitional circuit instead of the static one");
    compile_cmd->add_option("--variable", compile_opts.variable,
                            "Tracked variable for --transitional (default: the only one)");
    compile_cmd->add_option("--out", compile_opts.out, "Output OpenQASM path")->required();
    compile_cmd->add_option("--metrics", compile_opts.metrics_out,
                            "Metrics JSON path (default: stdout)");

    InferOpts infer_opts;
    CLI::App* infer_cmd =
        app.add_subcommand("infer", "Posterior of one evidence step as JSON");
    infer_cmd->add_option("--model", infer_opts.model_path, "Model JSON file")->required();
    infer_cmd->add_option("--step", infer_opts.step, "Evidence step to infer")
        ->capture_default_str();
    infer_cmd->add_option("--backend", infer_opts.backend, "Backend to run")
        ->capture_default_str();
    infer_cmd->add_option("--out", infer_opts.out, "Output JSON path (default: stdout)");
    add_engine_options(infer_cmd, infer_opts.engine);

    RunOpts run_opts;
    CLI::App* run_cmd =
        app.add_subcommand("run", "Run the full timeline and write the CSV report");
    run_cmd->add_option("--model", run_opts.model_path, "Model JSON file")->required();
    run_cmd->add_option("--backends", run_opts.backends, "Comma-separated backend list")
        ->capture_default_str();
    run_cmd->add_option("--out", run_opts.out, "Output CSV path (default: stdout)");
    run_cmd->add_option("--svg", run_opts.svg, "Also write a grouped bar chart SVG");
    add_engine_options(run_cmd, run_opts.engine);

    CompareOpts compare_opts;
    CLI::App* compare_cmd = app.add_subcommand(
        "compare", "Run the timeline and print the per-backend RMS summary");
    compare_cmd->add_option("--model", compare_opts.model_path, "Model JSON file")->required();
    compare_cmd->add_option("--backends", compare_opts.backends,
                            "Comma-separated backend list")
        ->capture_default_str();
    add_engine_options(compare_cmd, compare_opts.engine);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR:usage: " << e.what() << '\n';
        return 1;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return run_validate(validate_model_path);
        if (app.got_subcommand(compile_cmd)) return run_compile(compile_opts);
        if (app.got_subcommand(infer_cmd)) return run_infer(infer_opts);
        if (app.got_subcommand(run_cmd)) return run_run(run_opts);
        if (app.got_subcommand(compare_cmd)) return run_compare(compare_opts);
        std::cerr << "ERROR:usage: a subcommand is required\n";
        return 1;
    } catch (const dqbn::Error& e) {
        std::cerr << "ERROR:" << dqbn::to_string(e.category()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR:internal: " << e.what() << '\n';
        return 1;
    }
}
