#pragma once

#include <optional>

#include "stopval/belief.hpp"
#include "stopval/matrix.hpp"

namespace stopval {

/// Finite horizon with N decision periods after period 0, or infinite.
struct Horizon {
    bool is_infinite = false;
    int periods = 0;

    static Horizon finite(int n) { return {false, n}; }
    static Horizon infinite() { return {true, 0}; }
};

/// A Bayesian sequential stopping problem: stop with an irreversible action,
/// or pay for one more conditionally independent signal and decide again.
/// Waiting past the terminal period yields the outside option, worth zero.
struct StoppingProblem {
    Matrix payoffs;  // action x state utilities u(a, theta)
    bool include_outside_option = false;
    double discount = 1.0;
    Horizon horizon;
    Belief prior;
    InfoStructure info;
    std::optional<MarkovTransition> transition;

    StoppingProblem(Matrix payoffs_, bool outside, double discount_, Horizon horizon_,
                    Belief prior_, InfoStructure info_,
                    std::optional<MarkovTransition> transition_ = std::nullopt);

    std::size_t states() const { return payoffs.cols; }
    std::size_t actions() const { return payoffs.rows; }
    std::size_t signals() const { return info.signals(); }
    bool has_transition() const { return transition.has_value(); }
    double max_abs_payoff() const;

    StoppingProblem with_discount(double d) const;
    StoppingProblem with_info(InfoStructure s) const;
    StoppingProblem with_prior(Belief mu) const;
    StoppingProblem with_horizon(Horizon h) const;
};

constexpr int kOutsideAction = -1;

struct StopDecision {
    double value = 0.0;
    int action = 0;  // kOutsideAction when the outside option wins
};

/// Best immediate stopping payoff pi(mu) = max_a sum_theta u(a,theta) mu_theta,
/// including the zero-value outside option when the problem carries one.
/// Ties break toward the lowest action index, with the outside option last.
StopDecision stopping_payoff(const Belief& mu, const StoppingProblem& problem);

}  // namespace stopval
