#include "dqbn/bayes_net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <sstream>

#include "dqbn/error.hpp"

namespace dqbn {

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

bool sums_to_one(const std::vector<double>& row) {
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    return std::abs(sum - 1.0) <= kProbTolerance;
}

bool has_negative(const std::vector<double>& row) {
    return std::any_of(row.begin(), row.end(), [](double v) { return v < 0.0; });
}

}  // namespace

bool Distribution::is_normalized(double tol) const {
    if (p.empty()) return false;
    if (has_negative(p)) return false;
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    return std::abs(sum - 1.0) <= tol;
}

void Distribution::normalize() {
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(sum > 0.0)) {
        throw Error(ErrorCategory::Inference, "cannot normalize distribution with zero mass");
    }
    for (double& v : p) v /= sum;
}

std::string NodeSpec::state_label(int state) const {
    if (state >= 0 && static_cast<std::size_t>(state) < state_labels.size()) {
        return state_labels[static_cast<std::size_t>(state)];
    }
    return std::to_string(state);
}

int NodeSpec::state_index(const std::string& label) const {
    for (std::size_t i = 0; i < state_labels.size(); ++i) {
        if (state_labels[i] == label) return static_cast<int>(i);
    }
    if (state_labels.empty()) {
        // Unnamed states answer to the numeric labels state_label emits.
        int value = 0;
        auto [end, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
        if (ec == std::errc{} && end == label.data() + label.size() && value >= 0 &&
            value < num_states) {
            return value;
        }
    }
    return -1;
}

bool DiscreteNetwork::has_node(const std::string& name) const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const NodeSpec& n) { return n.name == name; });
}

const NodeSpec& DiscreteNetwork::node(const std::string& name) const {
    for (const NodeSpec& n : nodes) {
        if (n.name == name) return n;
    }
    throw Error(ErrorCategory::Inference, "unknown node '" + name + "'");
}

int DiscreteNetwork::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<Violation> validate_network(const DiscreteNetwork& net) {
    std::vector<Violation> out;
    auto add = [&](const std::string& node, const std::string& rule, const std::string& msg) {
        out.push_back({node, rule, msg});
    };

    if (net.nodes.empty()) {
        add("", "structure", "network has no nodes");
        return out;
    }

    std::set<std::string> seen;
    for (const NodeSpec& n : net.nodes) {
        if (!is_identifier(n.name)) {
            add(n.name, "name", "node name is not a valid identifier");
        }
        if (!seen.insert(n.name).second) {
            add(n.name, "name", "duplicate node name");
        }
    }

    bool any_state_var = false;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const NodeSpec& n = net.nodes[i];
        if (n.role == NodeRole::StateVariable) any_state_var = true;

        if (n.num_states < 2) {
            add(n.name, "states", "num_states must be at least 2");
            continue;
        }
        if (!n.state_labels.empty()) {
            if (n.state_labels.size() != static_cast<std::size_t>(n.num_states)) {
                add(n.name, "state-labels", "label count does not match num_states");
            }
            std::set<std::string> unique(n.state_labels.begin(), n.state_labels.end());
            if (unique.size() != n.state_labels.size()) {
                add(n.name, "state-labels", "duplicate state label");
            }
            if (unique.count("")) {
                add(n.name, "state-labels", "empty state label");
            }
        }

        // Parents must exist and appear earlier in the node list; this
        // is exactly the topological-order invariant and rules out
        // cycles (including self-parenting).
        std::size_t expected_rows = 1;
        bool parents_ok = true;
        for (const std::string& p : n.parents) {
            int idx = net.node_index(p);
            if (idx < 0) {
                add(n.name, "parents", "unknown parent '" + p + "'");
                parents_ok = false;
            } else if (static_cast<std::size_t>(idx) >= i) {
                add(n.name, "cycle",
                    "parent '" + p + "' does not precede node in topological order");
                parents_ok = false;
            } else {
                expected_rows *= static_cast<std::size_t>(net.nodes[idx].num_states);
            }
        }
        if (!parents_ok) continue;

        if (n.cpt.size() != expected_rows) {
            std::ostringstream msg;
            msg << "cpt has " << n.cpt.size() << " rows, expected " << expected_rows
                << " (product of parent cardinalities)";
            add(n.name, "cpt-shape", msg.str());
            continue;
        }
        for (std::size_t r = 0; r < n.cpt.size(); ++r) {
            const auto& row = n.cpt[r];
            if (row.size() != static_cast<std::size_t>(n.num_states)) {
                std::ostringstream msg;
                msg << "cpt row " << r << " has " << row.size() << " entries, expected "
                    << n.num_states;
                add(n.name, "cpt-shape", msg.str());
                continue;
            }
            if (has_negative(row)) {
                std::ostringstream msg;
                msg << "cpt row " << r << " has a negative entry";
                add(n.name, "negative-probability", msg.str());
            }
            if (!sums_to_one(row)) {
                std::ostringstream msg;
                msg << "cpt row " << r << " column sum != 1";
                add(n.name, "column-sum", msg.str());
            }
        }
    }

    if (!any_state_var) {
        add("", "roles", "network needs at least one state-variable node");
    }
    return out;
}

std::vector<Violation> validate_transition(const DiscreteNetwork& net,
                                           const TransitionModel& model) {
    std::vector<Violation> out;
    auto add = [&](const std::string& rule, const std::string& msg) {
        out.push_back({model.variable, rule, msg});
    };

    if (!net.has_node(model.variable)) {
        add("transition", "transition references unknown node");
        return out;
    }
    const NodeSpec& node = net.node(model.variable);
    std::size_t n = static_cast<std::size_t>(node.num_states);
    if (model.matrix.size() != n) {
        add("transition-shape", "matrix row count does not match node num_states");
        return out;
    }
    for (const auto& row : model.matrix) {
        if (row.size() != n) {
            add("transition-shape", "matrix is not square over node num_states");
            return out;
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        double sum = 0.0;
        bool negative = false;
        for (std::size_t row = 0; row < n; ++row) {
            sum += model.matrix[row][col];
            negative = negative || model.matrix[row][col] < 0.0;
        }
        if (negative) {
            add("negative-probability", "transition column " + std::to_string(col) +
                                            " has a negative entry");
        }
        if (std::abs(sum - 1.0) > kProbTolerance) {
            add("column-sum", "transition column " + std::to_string(col) + " sum != 1");
        }
    }
    return out;
}

std::vector<Violation> validate_evidence(const DiscreteNetwork& net, const Evidence& evidence) {
    std::vector<Violation> out;
    for (const auto& [name, state] : evidence.assignments) {
        if (!net.has_node(name)) {
            out.push_back({name, "evidence", "evidence on node not present in the network"});
            continue;
        }
        const NodeSpec& n = net.node(name);
        if (state < 0 || state >= n.num_states) {
            out.push_back({name, "evidence",
                           "state index " + std::to_string(state) + " out of range [0, " +
                               std::to_string(n.num_states) + ")"});
        }
    }
    return out;
}

double joint_probability(const DiscreteNetwork& net,
                         const std::map<std::string, int>& assignment) {
    double prob = 1.0;
    for (const NodeSpec& n : net.nodes) {
        auto it = assignment.find(n.name);
        if (it == assignment.end()) {
            throw Error(ErrorCategory::Inference,
                        "assignment missing node '" + n.name + "'");
        }
        int state = it->second;
        if (state < 0 || state >= n.num_states) {
            throw Error(ErrorCategory::Inference,
                        "assignment state out of range for node '" + n.name + "'");
        }
        // Row index: row-major over the parent list order.
        std::size_t row = 0;
        for (const std::string& p : n.parents) {
            auto pit = assignment.find(p);
            if (pit == assignment.end()) {
                throw Error(ErrorCategory::Inference,
                            "assignment missing node '" + p + "'");
            }
            row = row * static_cast<std::size_t>(net.node(p).num_states) +
                  static_cast<std::size_t>(pit->second);
        }
        prob *= n.cpt[row][static_cast<std::size_t>(state)];
    }
    return prob;
}

Distribution exact_posterior(const DiscreteNetwork& net, const std::string& target,
                             const Evidence& evidence) {
    if (!net.has_node(target)) {
        throw Error(ErrorCategory::Inference, "unknown target node '" + target + "'");
    }
    if (evidence.contains(target)) {
        throw Error(ErrorCategory::Inference,
                    "target '" + target + "' must not appear in the evidence");
    }
    auto violations = validate_evidence(net, evidence);
    if (!violations.empty()) {
        throw Error(ErrorCategory::Inference, violations.front().message);
    }

    const NodeSpec& target_node = net.node(target);
    Distribution posterior;
    posterior.p.assign(static_cast<std::size_t>(target_node.num_states), 0.0);

    // Exhaustive enumeration over the free (non-evidence) nodes.
    std::vector<const NodeSpec*> free_nodes;
    std::map<std::string, int> assignment;
    for (const NodeSpec& n : net.nodes) {
        auto it = evidence.assignments.find(n.name);
        if (it != evidence.assignments.end()) {
            assignment[n.name] = it->second;
        } else {
            free_nodes.push_back(&n);
            assignment[n.name] = 0;
        }
    }

    while (true) {
        double p = joint_probability(net, assignment);
        posterior.p[static_cast<std::size_t>(assignment[target])] += p;

        // Odometer increment over the free nodes.
        std::size_t k = 0;
        for (; k < free_nodes.size(); ++k) {
            int& v = assignment[free_nodes[k]->name];
            if (++v < free_nodes[k]->num_states) break;
            v = 0;
        }
        if (k == free_nodes.size()) break;
    }

    double total = std::accumulate(posterior.p.begin(), posterior.p.end(), 0.0);
    if (!(total > 0.0)) {
        throw Error(ErrorCategory::Inference, "impossible evidence (zero total probability)");
    }
    for (double& v : posterior.p) v /= total;
    return posterior;
}

Distribution propagate_transition(const Distribution& current, const TransitionModel& model) {
    std::size_t n = static_cast<std::size_t>(model.num_states());
    if (current.size() != n) {
        throw Error(ErrorCategory::Inference,
                    "distribution dimension does not match transition model");
    }
    Distribution next;
    next.p.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            next.p[j] += model.matrix[j][i] * current.p[i];
        }
    }
    return next;
}

}  // namespace dqbn
