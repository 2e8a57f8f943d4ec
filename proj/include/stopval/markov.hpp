#pragma once

#include <vector>

#include "stopval/fees.hpp"
#include "stopval/history_tree.hpp"
#include "stopval/problem.hpp"

namespace stopval {

/// Best payoff available without the information provider: act now, or let
/// the state drift for n periods and act then,
///   Pi(mu0) = max{ pi(mu0), max_{1<=n<=N} delta^n pi(mu0 tau^n) }.
double rejection_value(const StoppingProblem& problem);

/// Decision tree for the drifting-state model, where each period offers a
/// three-way choice: stop, wait (belief drifts, no signal, no fee), or acquire
/// a signal about next period's state. The root's stop branch is worth the
/// full rejection value Pi(mu0), and both accept branches pay the lump-sum fee.
struct MarkovTree {
    struct Node {
        explicit Node(Belief b) : belief(std::move(b)) {}

        int period = 0;
        History history;        // signals the decision maker actually bought
        Belief belief;          // belief when deciding
        double edge_prob = 1.0; // probability of the arc from the parent
        double value = 0.0;
        double stop_value = 0.0;
        double wait_value = 0.0;     // NaN when unavailable
        double acquire_value = 0.0;  // NaN when unavailable
        Decision decision = Decision::stop;
        int action = 0;
        int acquisitions = 0;
        int parent = -1;
        int wait_child = -1;
        std::vector<int> acquire_children;  // one per signal, -1 for dead branches
    };

    std::vector<Node> nodes;  // depth-first; nodes[0] is the root

    double root_value() const { return nodes.front().value; }
    const Node& root() const { return nodes.front(); }
};

struct MarkovSolution {
    MarkovTree tree;
    double rejection = 0.0;
    // Weak acceptance: the best engage branch (wait or acquire, fees included)
    // matches or beats the rejection value Pi.
    bool accepted = false;
};

/// Solves the drifting-state problem under a fee scheme. `max_acquisitions`
/// caps the number of signals along any path (negative = unlimited).
MarkovSolution solve_markov(const StoppingProblem& problem, const FeeScheme& fee,
                            std::size_t node_budget = kDefaultTreeBudget,
                            int max_acquisitions = -1);

/// Largest acceptable lump sum in the drifting-state model:
/// max{0, V_0(zero fees) - Pi(mu0)}.
double markov_value_of_information(const StoppingProblem& problem,
                                   std::size_t node_budget = kDefaultTreeBudget,
                                   int max_acquisitions = -1);

}  // namespace stopval
