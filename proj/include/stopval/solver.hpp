#pragma once

#include <vector>

#include "stopval/pwlc.hpp"
#include "stopval/problem.hpp"

namespace stopval {

enum class Decision { stop, acquire, wait, forgo };

const char* to_string(Decision d);

struct PolicyDecision {
    Decision kind = Decision::stop;
    int action = 0;  // meaningful when kind == stop; kOutsideAction for the outside option
};

/// Per-period policy summary. For two-state problems `threshold` is the
/// boundary (probability of state 0, or of state 1 when !stop_above) above
/// which stopping with the best real action is optimal; the region below is
/// acquisition or the outside option.
struct PolicyLayer {
    int period = 0;
    bool has_threshold = false;
    double threshold = 0.0;
    bool stop_above = true;
};

struct SolvedLayer {
    PwlcValue value;
    PolicyLayer policy;
};

/// Backward-induction output: layers[n] is the period-n value function,
/// n = 0..N.
struct FiniteSolution {
    std::vector<SolvedLayer> layers;

    int last_period() const { return int(layers.size()) - 1; }
    const PwlcValue& value(int period) const { return layers[period].value; }
};

struct InfiniteSolution {
    PwlcValue value;
    int sweeps = 0;
    bool has_threshold = false;
    double threshold = 0.0;
    bool stop_above = true;
    std::vector<double> sweep_deltas;  // successive sup-norm changes
};

/// Terminal layer max{pi(mu), 0}: the action payoffs plus the zero vector for
/// waiting past the horizon.
PwlcValue terminal_value(const StoppingProblem& problem);

/// One exact dynamic-programming step for a history-independent per-signal fee:
///   V(mu) = max{ pi(mu), discount * [ E V_next(posterior) - flat_fee ] }.
/// Continuation alphas are cross-sums over signal branches, composed with the
/// Markov transition when the problem has one; the result is pruned.
PwlcValue backup(const PwlcValue& next, const StoppingProblem& problem, double flat_fee);

/// Full finite-horizon solve under a constant per-signal fee (zero lump sum).
FiniteSolution solve_finite(const StoppingProblem& problem, double flat_fee = 0.0);

/// Value iteration with pruned PWLC backups until the sup-norm sweep change
/// drops below tol*(1-d)/(2d). Each sweep additionally drops envelope pieces
/// worth less than `keep_margin` (defaulting to tol*(1-d)/2, which keeps the
/// overall sup-norm error within tol; exact iterates grow exponentially many
/// pieces otherwise). Pass keep_margin = 0 for exact sweeps. Throws
/// NonConvergence when the sweep cap is reached first. Requires discount < 1;
/// fees are zero (a lump sum would not alter the recursion).
InfiniteSolution solve_infinite(const StoppingProblem& problem, double tol = 1e-6,
                                int sweep_cap = 100000, double keep_margin = -1.0);

/// Policy read-off at a belief. `terminal` marks the last period, where the
/// only choices are stopping and the worthless wait-out. Ties go to stopping.
PolicyDecision decide(const PwlcValue& layer, const StoppingProblem& problem, const Belief& mu,
                      bool terminal, double tie_tol = 1e-9);

/// Two-state threshold extraction: boundary of the region (adjacent to the
/// favored vertex) where stopping with the best real action attains the value
/// function. Bisection to 1e-7.
PolicyLayer extract_threshold(const PwlcValue& layer, const StoppingProblem& problem,
                              int period);

/// Barycentric lattice over the belief simplex (m >= 2).
std::vector<Belief> simplex_grid(std::size_t states, std::size_t subdivisions);

}  // namespace stopval
