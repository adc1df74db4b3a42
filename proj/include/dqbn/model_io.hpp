#pragma once

#include <string>
#include <vector>

#include "dqbn/engine.hpp"

namespace dqbn {

struct ParsedModel {
    std::string name;  // optional document title, may be empty
    DqbnModel model;
    EvidenceSequence evidence;
};

// Strict parse of a model JSON document. Unknown keys are rejected and
// every diagnostic cites the JSON path of the offending element
// ("$.nodes[2].cpt[1]" style). The result is fully validated: network
// structure, transitions, tracked/observation roles, and evidence
// labels resolved to state indices by declaration order.
ParsedModel parse_model(const std::string& text);

// Like parse_model, but semantic violations (network, transition,
// role, and evidence-resolution problems) are collected as formatted
// "path: message" lines instead of aborting on the first. Structural
// JSON and schema errors still throw.
ParsedModel parse_model_report(const std::string& text, std::vector<std::string>& violations);

// parse_model over the contents of a file.
ParsedModel load_model(const std::string& path);

// Canonical serialization: fixed key order, two-space indent, evidence
// written back as state labels. parse(serialize(m)) reproduces m, and
// serializing the reparse yields identical bytes.
std::string serialize_model(const ParsedModel& parsed);

}  // namespace dqbn
