#include "dqbn/model_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dqbn/error.hpp"

namespace dqbn {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw Error(ErrorCategory::Schema, path + ": " + message);
}

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) fail(path, "unknown key '" + it.key() + "'");
    }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
}

std::string get_string(const Json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s.empty()) fail(path, "string must not be empty");
    return s;
}

double get_number(const Json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::vector<std::string> get_string_array(const Json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(get_string(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> get_matrix(const Json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        const Json& row = v[i];
        if (!row.is_array()) fail(row_path, "expected an array of numbers");
        std::vector<double> values;
        for (std::size_t j = 0; j < row.size(); ++j) {
            values.push_back(get_number(row[j], row_path + "[" + std::to_string(j) + "]"));
        }
        out.push_back(std::move(values));
    }
    return out;
}

NodeSpec parse_node(const Json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, path, {"name", "states", "parents", "cpt"});
    NodeSpec node;
    node.name = get_string(require(v, path, "name"), path + ".name");
    node.state_labels = get_string_array(require(v, path, "states"), path + ".states");
    node.num_states = static_cast<int>(node.state_labels.size());
    if (auto it = v.find("parents"); it != v.end()) {
        node.parents = get_string_array(*it, path + ".parents");
    }
    node.cpt = get_matrix(require(v, path, "cpt"), path + ".cpt");
    return node;
}

TransitionModel parse_transition(const Json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    check_keys(v, path, {"variable", "matrix"});
    TransitionModel t;
    t.variable = get_string(require(v, path, "variable"), path + ".variable");
    t.matrix = get_matrix(require(v, path, "matrix"), path + ".matrix");
    return t;
}

std::string format_violation(const Violation& v, const std::string& path) {
    std::string msg = path + ": ";
    if (!v.node.empty()) msg += "'" + v.node + "': ";
    msg += v.message;
    return msg;
}

// Either appends a diagnostic to the collector (report mode) or aborts
// the parse with it (strict mode).
struct Diagnostics {
    std::vector<std::string>* collector = nullptr;

    void report(const std::string& path, const std::string& message) const {
        if (collector == nullptr) fail(path, message);
        collector->push_back(path + ": " + message);
    }
    void report(const Violation& v, const std::string& path) const {
        std::string msg = format_violation(v, path);
        if (collector == nullptr) throw Error(ErrorCategory::Schema, msg);
        collector->push_back(msg);
    }
};

// Point validation reports back at the element of the document that
// caused them. validate_model repeats the network and transition
// checks, so reports are deduplicated by content and the first
// (best-pathed) mention wins.
void check_model_violations(const DqbnModel& model, const Diagnostics& diag) {
    std::set<std::string> seen;
    auto emit = [&](const Violation& v, const std::string& path) {
        if (!seen.insert(v.node + '\x1f' + v.rule + '\x1f' + v.message).second) return;
        diag.report(v, path);
    };
    for (const Violation& v : validate_network(model.static_net)) {
        int index = model.static_net.has_node(v.node) ? model.static_net.node_index(v.node) : -1;
        emit(v, index >= 0 ? "$.nodes[" + std::to_string(index) + "]" : "$.nodes");
    }
    for (std::size_t i = 0; i < model.transitions.size(); ++i) {
        for (const Violation& v : validate_transition(model.static_net, model.transitions[i])) {
            emit(v, "$.transitions[" + std::to_string(i) + "]");
        }
    }
    for (const Violation& v : validate_model(model)) {
        if (v.rule == "tracked") {
            emit(v, "$.tracked");
        } else if (v.rule == "observations") {
            emit(v, "$.observations");
        } else if (v.rule == "transition") {
            emit(v, "$.transitions");
        }
    }
}

EvidenceSequence parse_evidence_sequence(const Json& v, const std::string& path,
                                         const DqbnModel& model, const Diagnostics& diag) {
    if (!v.is_array()) fail(path, "expected an array");
    std::set<std::string> observed(model.observations.begin(), model.observations.end());
    EvidenceSequence sequence;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string step_path = path + "[" + std::to_string(i) + "]";
        const Json& step = v[i];
        if (!step.is_object()) fail(step_path, "expected an object");
        Evidence evidence;
        for (auto it = step.begin(); it != step.end(); ++it) {
            const std::string entry_path = step_path + "." + it.key();
            if (!model.static_net.has_node(it.key())) {
                diag.report(entry_path, "unknown variable '" + it.key() + "'");
                continue;
            }
            if (!observed.count(it.key())) {
                diag.report(entry_path, "evidence on a non-observation variable");
                continue;
            }
            const NodeSpec& node = model.static_net.node(it.key());
            std::string label = get_string(*it, entry_path);
            int state = node.state_index(label);
            if (state < 0) {
                diag.report(entry_path,
                            "unknown state label '" + label + "' for '" + it.key() + "'");
                continue;
            }
            evidence.assignments[it.key()] = state;
        }
        sequence.steps.push_back(std::move(evidence));
    }
    return sequence;
}

ParsedModel parse_model_impl(const std::string& text, std::vector<std::string>* collector) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCategory::Json, e.what());
    }
    if (!doc.is_object()) fail("$", "expected a JSON object");
    check_keys(doc, "$",
               {"name", "nodes", "transitions", "tracked", "observations",
                "evidence_sequence"});

    ParsedModel parsed;
    if (auto it = doc.find("name"); it != doc.end()) {
        parsed.name = get_string(*it, "$.name");
    }

    const Json& nodes = require(doc, "$", "nodes");
    if (!nodes.is_array()) fail("$.nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        parsed.model.static_net.nodes.push_back(
            parse_node(nodes[i], "$.nodes[" + std::to_string(i) + "]"));
    }

    const Json& transitions = require(doc, "$", "transitions");
    if (!transitions.is_array()) fail("$.transitions", "expected an array");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        parsed.model.transitions.push_back(
            parse_transition(transitions[i], "$.transitions[" + std::to_string(i) + "]"));
    }

    parsed.model.tracked = get_string_array(require(doc, "$", "tracked"), "$.tracked");
    parsed.model.observations =
        get_string_array(require(doc, "$", "observations"), "$.observations");

    std::set<std::string> observed(parsed.model.observations.begin(),
                                   parsed.model.observations.end());
    for (NodeSpec& node : parsed.model.static_net.nodes) {
        node.role = observed.count(node.name) ? NodeRole::ObservationVariable
                                              : NodeRole::StateVariable;
    }

    Diagnostics diag{collector};
    check_model_violations(parsed.model, diag);

    parsed.evidence = parse_evidence_sequence(require(doc, "$", "evidence_sequence"),
                                              "$.evidence_sequence", parsed.model, diag);
    return parsed;
}

}  // namespace

ParsedModel parse_model(const std::string& text) { return parse_model_impl(text, nullptr); }

ParsedModel parse_model_report(const std::string& text, std::vector<std::string>& violations) {
    return parse_model_impl(text, &violations);
}

ParsedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCategory::Io, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(ErrorCategory::Io, "failed reading '" + path + "'");
    return parse_model(buffer.str());
}

std::string serialize_model(const ParsedModel& parsed) {
    Json doc = Json::object();
    if (!parsed.name.empty()) doc["name"] = parsed.name;

    Json nodes = Json::array();
    for (const NodeSpec& node : parsed.model.static_net.nodes) {
        Json n = Json::object();
        n["name"] = node.name;
        Json labels = Json::array();
        for (int s = 0; s < node.num_states; ++s) labels.push_back(node.state_label(s));
        n["states"] = labels;
        n["parents"] = node.parents;
        n["cpt"] = node.cpt;
        nodes.push_back(std::move(n));
    }
    doc["nodes"] = std::move(nodes);

    Json transitions = Json::array();
    for (const TransitionModel& t : parsed.model.transitions) {
        Json entry = Json::object();
        entry["variable"] = t.variable;
        entry["matrix"] = t.matrix;
        transitions.push_back(std::move(entry));
    }
    doc["transitions"] = std::move(transitions);

    doc["tracked"] = parsed.model.tracked;
    doc["observations"] = parsed.model.observations;

    Json sequence = Json::array();
    for (const Evidence& evidence : parsed.evidence.steps) {
        Json step = Json::object();
        for (const auto& [name, state] : evidence.assignments) {
            step[name] = parsed.model.static_net.node(name).state_label(state);
        }
        sequence.push_back(std::move(step));
    }
    doc["evidence_sequence"] = std::move(sequence);

    return doc.dump(2) + "\n";
}

}  // namespace dqbn
