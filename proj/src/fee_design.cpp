#include "stopval/fee_design.hpp"

#include <cmath>
#include <stdexcept>

#include "stopval/errors.hpp"

namespace stopval {

FeeEvaluation evaluate_fee(const StoppingProblem& problem, const FeeScheme& fee,
                           std::size_t node_budget) {
    const HistoryTree tree = solve_history_tree(problem, fee, node_budget);
    const double delta = problem.discount;

    // Forward pass over the solved policy. A node contributes only when every
    // ancestor acquired; its arrival fee is then due whatever the node itself
    // decides, and a stop adds the (fee-free) stopping payoff to the gross value.
    double rho = 0.0;
    double gross = 0.0;
    std::vector<char> reached(tree.nodes.size(), 0);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        if (node.dead) continue;
        if (node.parent >= 0 &&
            !(reached[node.parent] && tree.nodes[node.parent].decision == Decision::acquire))
            continue;
        reached[i] = 1;
        const double disc = std::pow(delta, node.period);
        if (node.period > 0)
            rho += disc * fee.effective_fee(node.history, delta) * node.reach_prob;
        else if (node.decision == Decision::acquire)
            rho += fee.effective_fee({}, delta);
        if (node.decision == Decision::stop)
            gross += disc * node.stop_value * node.reach_prob;
    }

    FeeEvaluation eval;
    eval.dm_value = tree.root_value();
    eval.expected_total_fee = rho;
    eval.gross_value = gross;
    const double pi0 = stopping_payoff(problem.prior, problem).value;
    eval.accepted = eval.dm_value > pi0;

    const double scale = std::max(1.0, problem.max_abs_payoff());
    if (std::abs(eval.dm_value - (eval.gross_value - eval.expected_total_fee)) > 1e-9 * scale)
        throw std::logic_error("evaluate_fee: value decomposition identity violated");
    return eval;
}

double value_of_information(const StoppingProblem& problem) {
    const double pi0 = stopping_payoff(problem.prior, problem).value;
    double v0;
    if (problem.horizon.is_infinite)
        v0 = value_at(solve_infinite(problem, 1e-8).value, problem.prior);
    else
        v0 = value_at(solve_finite(problem, 0.0).value(0), problem.prior);
    return std::max(0.0, v0 - pi0);
}

SupremumReport supremum_check(const StoppingProblem& problem, const FeeSampler& sampler,
                              int trials, std::uint64_t seed) {
    SupremumReport report;
    report.upper_bound = value_of_information(problem);
    SplitRng rng(seed);
    for (int t = 0; t < trials; ++t) {
        SplitRng sub = rng.substream(std::uint64_t(t));
        const FeeScheme scheme = sampler(sub);
        const FeeEvaluation eval = evaluate_fee(problem, scheme);
        ++report.trials;
        if (!eval.accepted) continue;
        ++report.accepted;
        report.max_fee_found = std::max(report.max_fee_found, eval.expected_total_fee);
        if (eval.expected_total_fee > report.upper_bound + 1e-9)
            throw CounterexampleFound(
                "supremum_check: accepted scheme extracts more than the upfront bound", scheme);
    }
    report.gap = report.upper_bound - report.max_fee_found;
    return report;
}

FeeSampler uniform_tree_sampler(const StoppingProblem& problem, double fee_scale) {
    if (problem.horizon.is_infinite)
        throw std::invalid_argument("uniform_tree_sampler: requires a finite horizon");
    const int periods = problem.horizon.periods;
    const int k = int(problem.signals());
    std::vector<History> histories{{}};
    for (std::size_t i = 0; i < histories.size(); ++i) {
        if (int(histories[i].size()) >= periods) continue;
        for (int s = 0; s < k; ++s) histories.push_back(extend(histories[i], {s}));
    }
    return [histories, fee_scale](SplitRng& rng) {
        std::map<History, double> fees;
        for (const auto& h : histories) fees[h] = rng.next_uniform(0.0, fee_scale);
        return FeeScheme::explicit_tree(std::move(fees));
    };
}

DelayedLumpPlan optimal_delayed_lump(double phi, double dm_discount, double ip_discount,
                                     int k_bar) {
    if (!(dm_discount > 0.0) || dm_discount > 1.0 || !(ip_discount > 0.0) || ip_discount > 1.0)
        throw InvalidDiscount("optimal_delayed_lump: discounts must lie in (0, 1]");
    if (phi < 0.0) throw std::invalid_argument("optimal_delayed_lump: negative value");
    if (k_bar < 0) throw std::invalid_argument("optimal_delayed_lump: negative delay bound");
    DelayedLumpPlan plan;
    if (ip_discount <= dm_discount || k_bar == 0) {
        plan.delay = 0;
        plan.payment = phi;
        plan.ip_value = phi;
        return plan;
    }
    plan.delay = k_bar;
    plan.payment = phi / std::pow(dm_discount, k_bar);
    plan.ip_value = std::pow(ip_discount, k_bar) * plan.payment;
    return plan;
}

namespace {

class QuotaBuilder {
  public:
    QuotaBuilder(const StoppingProblem& problem, const FeeScheme& fee, int per_period_cap,
                 std::size_t budget)
        : problem_(problem), fee_(fee), cap_(per_period_cap), budget_(budget) {}

    QuotaTree take() && { return std::move(tree_); }

    int build(int period, int quota, const History& history, const Belief& belief) {
        if (tree_.nodes.size() >= budget_)
            throw TreeTooLarge("solve_multi_signal: node budget exceeded");
        const int idx = int(tree_.nodes.size());
        {
            QuotaTree::Node node(belief);
            node.period = period;
            node.quota = quota;
            node.history = history;
            tree_.nodes.push_back(std::move(node));
        }
        const StopDecision sd = stopping_payoff(belief, problem_);
        tree_.nodes[idx].stop_value = sd.value;
        const int n_periods = problem_.horizon.periods;
        const double delta = problem_.discount;

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

        double best = sd.value;
        Decision best_kind = Decision::stop;
        int best_batch = 0;

        if (quota <= 0) {
            // Quota exhausted: the belief can only drift.
            const int wait_child = build(period + 1, 0, history, pushed(belief));
            tree_.nodes[idx].wait_child = wait_child;
            const double wait_value = delta * tree_.nodes[wait_child].value;
            if (wait_value > best + 1e-12) {
                best = wait_value;
                best_kind = Decision::wait;
            }
        } else {
            const int max_batch = std::min(cap_, quota);
            for (int l = 1; l <= max_batch; ++l) {
                QuotaTree::Option opt = batch_option(idx, period, quota, l, history, belief);
                if (opt.value > best + 1e-12) {
                    best = opt.value;
                    best_kind = Decision::acquire;
                    best_batch = l;
                }
                tree_.nodes[idx].options.push_back(std::move(opt));
            }
        }

        auto& nd = tree_.nodes[idx];
        nd.value = best;
        nd.decision = best_kind;
        nd.chosen_batch = best_batch;
        nd.action = best_kind == Decision::stop ? sd.action : 0;
        return idx;
    }

  private:
    Belief pushed(const Belief& mu) const {
        return problem_.has_transition() ? markov_push(mu, *problem_.transition) : mu;
    }

    QuotaTree::Option batch_option(int parent, int period, int quota, int batch,
                                   const History& history, const Belief& belief) {
        (void)parent;
        const double delta = problem_.discount;
        const int k = int(problem_.signals());
        const Belief base = pushed(belief);

        QuotaTree::Option opt;
        opt.batch_size = batch;
        double expected_value = 0.0;
        double expected_fee = 0.0;
        std::vector<int> tuple(batch, 0);
        while (true) {
            // Joint likelihood of the tuple per state (signals conditionally
            // independent given the state).
            double marginal = 0.0;
            std::vector<double> post(problem_.states());
            for (std::size_t t = 0; t < problem_.states(); ++t) {
                double like = 1.0;
                for (int j = 0; j < batch; ++j) like *= problem_.info.likelihood(t, tuple[j]);
                post[t] = base[t] * like;
                marginal += post[t];
            }
            if (marginal > 1e-15) {
                for (double& p : post) p /= marginal;
                History child_history =
                    extend(history, SignalBatch(tuple.begin(), tuple.end()));
                const int child = build(period + 1, quota - batch, child_history, Belief(post));
                opt.children.push_back(child);
                expected_value += marginal * tree_.nodes[child].value;
                expected_fee += marginal * fee_.effective_fee(child_history, delta);
            } else {
                opt.children.push_back(-1);
            }
            int pos = batch - 1;
            while (pos >= 0 && ++tuple[pos] == k) {
                tuple[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        opt.value = delta * (expected_value - expected_fee);
        if (period == 0) opt.value -= fee_.effective_fee({}, delta);
        return opt;
    }

    const StoppingProblem& problem_;
    const FeeScheme& fee_;
    int cap_;
    std::size_t budget_;
    QuotaTree tree_;
};

}  // namespace

QuotaTree solve_multi_signal(const StoppingProblem& problem, int per_period_cap,
                             int total_quota, const FeeScheme& fee,
                             std::size_t node_budget) {
    if (problem.horizon.is_infinite)
        throw std::invalid_argument("solve_multi_signal: requires a finite horizon");
    if (per_period_cap < 1)
        throw std::invalid_argument("solve_multi_signal: per-period cap must be positive");
    if (total_quota < 0) throw std::invalid_argument("solve_multi_signal: negative quota");
    QuotaBuilder builder(problem, fee, per_period_cap, node_budget);
    builder.build(0, total_quota, {}, problem.prior);
    return std::move(builder).take();
}

}  // namespace stopval
