#pragma once

#include <map>
#include <string>
#include <vector>

namespace dqbn {

// Probability tolerance used for all "sums to one" style checks. Model
// files may carry rounded values, anything beyond this is rejected.
inline constexpr double kProbTolerance = 1e-9;

struct Distribution {
    std::vector<double> p;

    Distribution() = default;
    explicit Distribution(std::vector<double> values) : p(std::move(values)) {}
    Distribution(std::initializer_list<double> values) : p(values) {}

    std::size_t size() const { return p.size(); }
    double operator[](std::size_t i) const { return p[i]; }
    double& operator[](std::size_t i) { return p[i]; }

    bool is_normalized(double tol = kProbTolerance) const;
    // Rescales to sum 1; throws on nonpositive total mass.
    void normalize();
};

enum class NodeRole { StateVariable, ObservationVariable };

struct NodeSpec {
    std::string name;
    int num_states = 0;
    std::vector<std::string> parents;
    // One row per parent-state combination, row-major over the parent
    // list order (first parent varies slowest); each row is a
    // probability vector of length num_states. Roots have one row.
    std::vector<std::vector<double>> cpt;
    NodeRole role = NodeRole::StateVariable;
    // Human-readable state names in index order. Empty means unnamed;
    // reports then fall back to the numeric index.
    std::vector<std::string> state_labels;

    // Label for one state index ("0", "1", ... when unnamed).
    std::string state_label(int state) const;
    // Index of a label, -1 if it does not resolve.
    int state_index(const std::string& label) const;
};

// Static Bayesian network of one time slice. Nodes are stored in a
// topological order (parents precede children).
struct DiscreteNetwork {
    std::vector<NodeSpec> nodes;

    bool has_node(const std::string& name) const;
    const NodeSpec& node(const std::string& name) const;
    int node_index(const std::string& name) const;
};

// Markov transition of one state variable across consecutive slices:
// matrix[j][i] = P(next = j | current = i). Columns are stochastic.
struct TransitionModel {
    std::string variable;
    std::vector<std::vector<double>> matrix;

    int num_states() const { return static_cast<int>(matrix.size()); }
};

struct Evidence {
    std::map<std::string, int> assignments;

    bool contains(const std::string& name) const { return assignments.count(name) != 0; }
};

struct Violation {
    std::string node;
    std::string rule;
    std::string message;
};

// Structural and numeric checks for every invariant of the network
// types. Violations are data, not failures; an empty report means the
// network is valid.
std::vector<Violation> validate_network(const DiscreteNetwork& net);
std::vector<Violation> validate_transition(const DiscreteNetwork& net, const TransitionModel& model);
std::vector<Violation> validate_evidence(const DiscreteNetwork& net, const Evidence& evidence);

// Chain-rule product over all nodes; assignment must cover every node.
double joint_probability(const DiscreteNetwork& net, const std::map<std::string, int>& assignment);

// Exact P(target | evidence) by exhaustive enumeration over all
// completions. Throws on evidence with zero total probability.
Distribution exact_posterior(const DiscreteNetwork& net, const std::string& target,
                             const Evidence& evidence);

// Forward prediction: next(j) = sum_i matrix[j][i] * current(i).
Distribution propagate_transition(const Distribution& current, const TransitionModel& model);

}  // namespace dqbn
