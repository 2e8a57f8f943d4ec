#pragma once

#include <cstdint>
#include <functional>

#include "stopval/history_tree.hpp"
#include "stopval/rng.hpp"

namespace stopval {

/// Evaluation of a fee scheme from both sides of the transaction.
/// `dm_value` is the decision maker's optimal value facing the fees;
/// `gross_value` replays the identical policy with fees erased;
/// `expected_total_fee` is the discounted fee stream the policy generates.
/// The decomposition dm_value = gross_value - expected_total_fee is asserted.
struct FeeEvaluation {
    bool accepted = false;  // dm_value strictly above the no-information payoff
    double dm_value = 0.0;
    double gross_value = 0.0;
    double expected_total_fee = 0.0;
};

FeeEvaluation evaluate_fee(const StoppingProblem& problem, const FeeScheme& fee,
                           std::size_t node_budget = kDefaultTreeBudget);

/// Largest lump sum the provider can charge upfront without the decision maker
/// declining: max{0, V_0(zero fees) - pi(prior)}. Uses exact backward induction
/// for finite horizons and value iteration otherwise.
double value_of_information(const StoppingProblem& problem);

/// Thrown when a sampled accepted scheme extracts more than the upfront bound,
/// which signals an implementation bug.
struct CounterexampleFound : std::runtime_error {
    FeeScheme scheme;
    CounterexampleFound(std::string msg, FeeScheme s)
        : std::runtime_error(std::move(msg)), scheme(std::move(s)) {}
};

struct SupremumReport {
    int trials = 0;
    int accepted = 0;
    double upper_bound = 0.0;  // the upfront value
    double max_fee_found = 0.0;
    double gap = 0.0;  // upper_bound - max_fee_found over accepted schemes
};

using FeeSampler = std::function<FeeScheme(SplitRng&)>;

/// Monte Carlo audit: samples fee schemes, keeps the accepted ones, and checks
/// that none extracts more than value_of_information + 1e-9. Throws
/// CounterexampleFound on a violation.
SupremumReport supremum_check(const StoppingProblem& problem, const FeeSampler& sampler,
                              int trials, std::uint64_t seed = 2024);

/// Random explicit-tree schemes: i.i.d. uniform fees on [0, fee_scale] at
/// every history up to the problem's horizon.
FeeSampler uniform_tree_sampler(const StoppingProblem& problem, double fee_scale);

struct DelayedLumpPlan {
    int delay = 0;        // payment period K
    double payment = 0.0; // lump amount due at K
    double ip_value = 0.0;
};

/// Optimal lump-sum payment date when the provider and the decision maker
/// discount differently. With ip_discount <= dm_discount the immediate lump
/// sum (K = 0) stays optimal; otherwise delaying to the bound K_bar with
/// payment phi / dm_discount^K_bar is, and the provider's value grows like
/// (ip_discount/dm_discount)^K_bar.
DelayedLumpPlan optimal_delayed_lump(double phi, double dm_discount, double ip_discount,
                                     int k_bar);

/// Quota-augmented solve: up to `per_period_cap` conditionally independent
/// signals per period, at most `total_quota` overall. One fee per purchase
/// event covers the whole batch.
struct QuotaTree {
    struct Option {
        int batch_size = 0;
        double value = 0.0;
        std::vector<int> children;  // one per signal tuple, tuple index row-major
    };
    struct Node {
        explicit Node(Belief b) : belief(std::move(b)) {}

        int period = 0;
        int quota = 0;
        History history;
        Belief belief;
        double value = 0.0;
        double stop_value = 0.0;
        Decision decision = Decision::stop;
        int action = 0;
        int chosen_batch = 0;        // >0 when acquiring
        int wait_child = -1;         // quota-exhausted drift branch
        std::vector<Option> options;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    double root_value() const { return nodes.front().value; }
};

QuotaTree solve_multi_signal(const StoppingProblem& problem, int per_period_cap,
                             int total_quota, const FeeScheme& fee,
                             std::size_t node_budget = kDefaultTreeBudget);

}  // namespace stopval
