#include "stopval/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace stopval {

StoppingProblem::StoppingProblem(Matrix payoffs_, bool outside, double discount_,
                                 Horizon horizon_, Belief prior_, InfoStructure info_,
                                 std::optional<MarkovTransition> transition_)
    : payoffs(std::move(payoffs_)),
      include_outside_option(outside),
      discount(discount_),
      horizon(horizon_),
      prior(std::move(prior_)),
      info(std::move(info_)),
      transition(std::move(transition_)) {
    if (payoffs.cols < 2) throw std::invalid_argument("problem: need at least two states");
    if (payoffs.rows < 1) throw std::invalid_argument("problem: need at least one action");
    for (double v : payoffs.data)
        if (!std::isfinite(v)) throw std::invalid_argument("problem: non-finite payoff");
    if (!(discount > 0.0) || discount > 1.0)
        throw std::invalid_argument("problem: discount must lie in (0, 1]");
    if (horizon.is_infinite && discount >= 1.0)
        throw std::invalid_argument("problem: infinite horizon requires discount < 1");
    if (!horizon.is_infinite && horizon.periods < 0)
        throw std::invalid_argument("problem: negative horizon");
    if (prior.size() != payoffs.cols)
        throw std::invalid_argument("problem: prior length does not match the state count");
    if (info.states() != payoffs.cols)
        throw std::invalid_argument("problem: info structure rows do not match the state count");
    if (transition && transition->states() != payoffs.cols)
        throw std::invalid_argument("problem: transition size does not match the state count");
}

double StoppingProblem::max_abs_payoff() const {
    double worst = 0.0;
    for (double v : payoffs.data) worst = std::max(worst, std::abs(v));
    return worst;
}

StoppingProblem StoppingProblem::with_discount(double d) const {
    StoppingProblem copy = *this;
    copy.discount = d;
    return StoppingProblem(copy.payoffs, copy.include_outside_option, d, copy.horizon,
                           copy.prior, copy.info, copy.transition);
}

StoppingProblem StoppingProblem::with_info(InfoStructure s) const {
    return StoppingProblem(payoffs, include_outside_option, discount, horizon, prior,
                           std::move(s), transition);
}

StoppingProblem StoppingProblem::with_prior(Belief mu) const {
    return StoppingProblem(payoffs, include_outside_option, discount, horizon, std::move(mu),
                           info, transition);
}

StoppingProblem StoppingProblem::with_horizon(Horizon h) const {
    return StoppingProblem(payoffs, include_outside_option, discount, h, prior, info,
                           transition);
}

StopDecision stopping_payoff(const Belief& mu, const StoppingProblem& problem) {
    StopDecision best;
    bool have = false;
    for (std::size_t a = 0; a < problem.actions(); ++a) {
        double v = 0.0;
        for (std::size_t t = 0; t < problem.states(); ++t) v += problem.payoffs(a, t) * mu[t];
        if (!have || v > best.value) {
            best.value = v;
            best.action = int(a);
            have = true;
        }
    }
    if (problem.include_outside_option && best.value < 0.0) {
        best.value = 0.0;
        best.action = kOutsideAction;
    }
    return best;
}

}  // namespace stopval
