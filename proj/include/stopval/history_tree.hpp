#pragma once

#include <cstddef>
#include <vector>

#include "stopval/fees.hpp"
#include "stopval/problem.hpp"
#include "stopval/solver.hpp"

namespace stopval {

inline constexpr std::size_t kDefaultTreeBudget = 1000000;

/// Exact backward induction over the full signal-history tree. Used whenever
/// the fee depends on the realized history, which breaks belief-sufficiency.
struct HistoryTree {
    struct Node {
        int period = 0;
        History history;
        Belief belief;
        double reach_prob = 1.0;   // unconditional probability of the history
        double value = 0.0;        // optimal value at the node under the fee scheme
        double stop_value = 0.0;   // pi at the node's belief
        double acquire_value = 0.0;
        Decision decision = Decision::stop;
        int action = 0;
        int parent = -1;
        int first_child = -1;      // children contiguous, one per signal; -1 at leaves
        bool dead = false;         // unreachable branch (zero-probability signal)

        Node(Belief b) : belief(std::move(b)) {}
    };

    std::vector<Node> nodes;  // breadth-first; nodes[0] is the root

    const Node& root() const { return nodes.front(); }
    double root_value() const { return nodes.front().value; }
    int child(int node, int signal) const { return nodes[node].first_child + signal; }
};

/// Solves the stopping problem under an arbitrary fee scheme, charging each
/// fee one period after the acquisition that triggers it (or at period 0 for
/// the lump sum on acceptance). Beliefs are pushed through the transition (if
/// any) before each Bayes update. Throws TreeTooLarge when the full tree
/// would exceed `node_budget` nodes.
HistoryTree solve_history_tree(const StoppingProblem& problem, const FeeScheme& fee,
                               std::size_t node_budget = kDefaultTreeBudget);

}  // namespace stopval
