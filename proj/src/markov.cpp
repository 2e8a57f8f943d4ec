#include "stopval/markov.hpp"

#include <cmath>
#include <stdexcept>

#include "stopval/errors.hpp"

namespace stopval {

namespace {

MarkovTransition transition_of(const StoppingProblem& problem) {
    return problem.has_transition() ? *problem.transition
                                    : MarkovTransition::identity(problem.states());
}

class MarkovBuilder {
  public:
    MarkovBuilder(const StoppingProblem& problem, const FeeScheme& fee, std::size_t budget,
                  int max_acquisitions)
        : problem_(problem),
          fee_(fee),
          tau_(transition_of(problem)),
          budget_(budget),
          max_acq_(max_acquisitions) {}

    MarkovTree take() && { return std::move(tree_); }

    int build(int period, const History& history, const Belief& belief, double edge_prob,
              int acquisitions, int parent) {
        if (tree_.nodes.size() >= budget_)
            throw TreeTooLarge("solve_markov: node budget exceeded");
        const int idx = int(tree_.nodes.size());
        {
            MarkovTree::Node node(belief);
            node.period = period;
            node.history = history;
            node.edge_prob = edge_prob;
            node.acquisitions = acquisitions;
            node.parent = parent;
            node.wait_value = std::nan("");
            node.acquire_value = std::nan("");
            tree_.nodes.push_back(std::move(node));
        }

        const double delta = problem_.discount;
        const int n_periods = problem_.horizon.periods;
        const StopDecision sd = stopping_payoff(belief, problem_);
        // At the root, declining means keeping the whole drift-and-act plan.
        const bool is_root = period == 0 && parent < 0;
        const double stop_value = is_root ? rejection_value(problem_) : sd.value;
        tree_.nodes[idx].stop_value = stop_value;

        if (period >= n_periods) {
            auto& nd = tree_.nodes[idx];
            if (sd.value >= 0.0) {
                nd.value = sd.value;
                nd.decision = Decision::stop;
                nd.action = sd.action;
            } else {
                nd.value = 0.0;
                nd.decision = Decision::forgo;
                nd.action = kOutsideAction;
            }
            return idx;
        }

        const double lump = is_root ? fee_.effective_fee({}, delta) : 0.0;
        const Belief pushed = markov_push(belief, tau_);

        // Wait: the state drifts, no signal enters the relevant history.
        const int wait_child = build(period + 1, history, pushed, 1.0, acquisitions, idx);
        const double wait_value = delta * tree_.nodes[wait_child].value - lump;
        tree_.nodes[idx].wait_child = wait_child;
        tree_.nodes[idx].wait_value = wait_value;

        // Acquire: signal about next period's state (transition, then update).
        double acquire_value = std::nan("");
        if (max_acq_ < 0 || acquisitions < max_acq_) {
            const std::vector<double> alpha = signal_marginal(pushed, problem_.info);
            double expected_value = 0.0;
            double expected_fee = 0.0;
            std::vector<int> children;
            for (std::size_t s = 0; s < problem_.signals(); ++s) {
                if (alpha[s] <= 1e-15) {
                    children.push_back(-1);
                    continue;
                }
                const History child_history = extend(history, {int(s)});
                const int child = build(period + 1, child_history,
                                        bayes_update(pushed, problem_.info, s), alpha[s],
                                        acquisitions + 1, idx);
                children.push_back(child);
                expected_value += alpha[s] * tree_.nodes[child].value;
                expected_fee += alpha[s] * fee_.effective_fee(child_history, delta);
            }
            acquire_value = delta * (expected_value - expected_fee) - lump;
            tree_.nodes[idx].acquire_children = std::move(children);
        }
        tree_.nodes[idx].acquire_value = acquire_value;

        // Three-way max; ties resolve stop > wait > acquire.
        auto& nd = tree_.nodes[idx];
        double best = stop_value;
        Decision kind = Decision::stop;
        if (wait_value > best + 1e-12) {
            best = wait_value;
            kind = Decision::wait;
        }
        if (!std::isnan(acquire_value) && acquire_value > best + 1e-12) {
            best = acquire_value;
            kind = Decision::acquire;
        }
        nd.value = best;
        nd.decision = kind;
        nd.action = kind == Decision::stop ? sd.action : 0;
        return idx;
    }

  private:
    const StoppingProblem& problem_;
    const FeeScheme& fee_;
    MarkovTransition tau_;
    std::size_t budget_;
    int max_acq_;
    MarkovTree tree_;
};

}  // namespace

double rejection_value(const StoppingProblem& problem) {
    if (problem.horizon.is_infinite)
        throw std::invalid_argument("rejection_value: requires a finite horizon");
    const MarkovTransition tau = transition_of(problem);
    double best = stopping_payoff(problem.prior, problem).value;
    Belief mu = problem.prior;
    double disc = 1.0;
    for (int n = 1; n <= problem.horizon.periods; ++n) {
        mu = markov_push(mu, tau);
        disc *= problem.discount;
        best = std::max(best, disc * stopping_payoff(mu, problem).value);
    }
    return best;
}

MarkovSolution solve_markov(const StoppingProblem& problem, const FeeScheme& fee,
                            std::size_t node_budget, int max_acquisitions) {
    if (problem.horizon.is_infinite)
        throw std::invalid_argument("solve_markov: requires a finite horizon");
    MarkovBuilder builder(problem, fee, node_budget, max_acquisitions);
    builder.build(0, {}, problem.prior, 1.0, 0, -1);
    MarkovSolution sol;
    sol.tree = std::move(builder).take();
    sol.rejection = rejection_value(problem);
    // Accepting means actually engaging with the scheme: the best of the wait
    // and acquire branches must weakly beat walking away.
    const auto& root = sol.tree.root();
    double engage = root.wait_value;
    if (!std::isnan(root.acquire_value)) engage = std::max(engage, root.acquire_value);
    sol.accepted = engage >= sol.rejection;
    return sol;
}

double markov_value_of_information(const StoppingProblem& problem, std::size_t node_budget,
                                   int max_acquisitions) {
    const MarkovSolution sol =
        solve_markov(problem, FeeScheme::zero(), node_budget, max_acquisitions);
    return std::max(0.0, sol.tree.root_value() - sol.rejection);
}

}  // namespace stopval
