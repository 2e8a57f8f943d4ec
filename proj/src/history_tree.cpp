#include "stopval/history_tree.hpp"

#include <cmath>
#include <stdexcept>

#include "stopval/errors.hpp"

namespace stopval {

namespace {

std::size_t full_tree_size(std::size_t signals, int periods, std::size_t budget) {
    std::size_t total = 0;
    std::size_t level = 1;
    for (int n = 0; n <= periods; ++n) {
        if (level > budget - total) return budget + 1;  // saturates, avoids overflow
        total += level;
        if (n < periods) {
            if (level > budget / signals + 1) return budget + 1;
            level *= signals;
        }
    }
    return total;
}

}  // namespace

HistoryTree solve_history_tree(const StoppingProblem& problem, const FeeScheme& fee,
                               std::size_t node_budget) {
    if (problem.horizon.is_infinite)
        throw std::invalid_argument("solve_history_tree: requires a finite horizon");
    const int n_periods = problem.horizon.periods;
    const std::size_t k = problem.signals();
    if (full_tree_size(k, n_periods, node_budget) > node_budget)
        throw TreeTooLarge("solve_history_tree: node budget exceeded");

    HistoryTree tree;
    tree.nodes.reserve(full_tree_size(k, n_periods, node_budget));
    tree.nodes.emplace_back(problem.prior);
    tree.nodes[0].period = 0;

    // Forward pass: beliefs and reach probabilities, breadth-first.
    for (std::size_t idx = 0; idx < tree.nodes.size(); ++idx) {
        if (tree.nodes[idx].period >= n_periods || tree.nodes[idx].dead) continue;
        const Belief pushed = problem.has_transition()
                                  ? markov_push(tree.nodes[idx].belief, *problem.transition)
                                  : tree.nodes[idx].belief;
        const std::vector<double> alpha = signal_marginal(pushed, problem.info);
        tree.nodes[idx].first_child = int(tree.nodes.size());
        for (std::size_t s = 0; s < k; ++s) {
            const bool live = alpha[s] > 1e-15;
            HistoryTree::Node child(live ? bayes_update(pushed, problem.info, s) : pushed);
            child.period = tree.nodes[idx].period + 1;
            child.history = extend(tree.nodes[idx].history, {int(s)});
            child.reach_prob = tree.nodes[idx].reach_prob * alpha[s];
            child.parent = int(idx);
            child.dead = !live || tree.nodes[idx].dead;
            tree.nodes.push_back(std::move(child));
        }
    }

    // Backward pass: children precede parents in reverse order.
    const double delta = problem.discount;
    for (std::size_t r = tree.nodes.size(); r-- > 0;) {
        auto& node = tree.nodes[r];
        const StopDecision sd = stopping_payoff(node.belief, problem);
        node.stop_value = sd.value;
        if (node.first_child < 0) {  // terminal period: stop or wait out
            if (sd.value >= 0.0) {
                node.value = sd.value;
                node.decision = Decision::stop;
                node.action = sd.action;
            } else {
                node.value = 0.0;
                node.decision = Decision::forgo;
                node.action = kOutsideAction;
            }
            node.acquire_value = std::nan("");
            continue;
        }
        const Belief pushed = problem.has_transition()
                                  ? markov_push(node.belief, *problem.transition)
                                  : node.belief;
        const std::vector<double> alpha = signal_marginal(pushed, problem.info);
        double expected_value = 0.0;
        double expected_fee = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            const auto& child = tree.nodes[node.first_child + int(s)];
            if (child.dead) continue;
            expected_value += alpha[s] * child.value;
            expected_fee += alpha[s] * fee.effective_fee(child.history, delta);
        }
        node.acquire_value = delta * (expected_value - expected_fee);
        if (node.period == 0) node.acquire_value -= fee.effective_fee({}, delta);
        if (sd.value >= node.acquire_value - 1e-12) {
            node.value = sd.value;
            node.decision = Decision::stop;
            node.action = sd.action;
        } else {
            node.value = node.acquire_value;
            node.decision = Decision::acquire;
            node.action = 0;
        }
    }
    return tree;
}

}  // namespace stopval
