#pragma once

#include <cstddef>
#include <vector>

#include "stopval/belief.hpp"
#include "stopval/problem.hpp"

namespace stopval {

/// What a supporting linear functional stands for, kept for policy extraction.
struct AlphaTag {
    enum class Kind {
        stop,     // stop and take `action`
        outside,  // stop and take the outside option
        horizon,  // wait past the terminal period (worth zero)
        acquire,  // buy one more signal
    };
    Kind kind = Kind::stop;
    int action = 0;

    bool stops() const { return kind != Kind::acquire; }
};

struct AlphaVector {
    std::vector<double> coeffs;  // one utility per state
    AlphaTag tag;
};

/// Convex piecewise-linear value function represented as the upper envelope
/// of alpha vectors: value(mu) = max_alpha mu . alpha.
struct PwlcValue {
    std::vector<AlphaVector> alphas;

    std::size_t states() const { return alphas.empty() ? 0 : alphas.front().coeffs.size(); }
};

double dot(const std::vector<double>& alpha, const Belief& mu);

double value_at(const PwlcValue& v, const Belief& mu);

/// Index of the maximizing alpha at mu. Within `tie_tol` of the maximum the
/// earliest alpha wins; stopping alphas are stored first, so ties resolve to
/// stopping.
std::size_t best_alpha(const PwlcValue& v, const Belief& mu, double tie_tol = 1e-12);

/// Removes alphas that never attain the envelope: exact duplicates and
/// pointwise-dominated vectors first, then an LP witness test requiring each
/// survivor to reach the maximum somewhere on the simplex with margin
/// > -witness_tol.
PwlcValue prune(PwlcValue v, double witness_tol = 1e-9);

/// One linear piece of a two-state PWLC function: the alpha leading from
/// `from` (probability of state 0) until the next segment starts.
struct PwlSegment {
    double from;
    std::size_t alpha_index;
};

/// Upper-envelope pieces of a two-state value function, ordered by `from`
/// (the first entry is -infinity). Only pieces meeting [0,1] are returned.
std::vector<PwlSegment> envelope_segments(const PwlcValue& v);

/// Drops envelope pieces whose removal lowers the function by less than
/// `max_loss` anywhere on [0,1]. Never removes two adjacent pieces in one
/// pass, so the sup-norm perturbation is bounded by max_loss. Two-state only;
/// other state counts are returned unchanged.
PwlcValue simplify_two_state(PwlcValue v, double max_loss);

/// Exact sup-norm distance between two PWLC functions on the 2-state simplex,
/// evaluated at the envelopes' breakpoints and the endpoints.
double sup_diff_two_state(const PwlcValue& a, const PwlcValue& b);

/// Sup-norm distance sampled on a belief grid (any state count).
double sup_diff_on_grid(const PwlcValue& a, const PwlcValue& b,
                        const std::vector<Belief>& grid);

/// Evenly spaced two-state beliefs (probability of state 0 from 0 to 1).
std::vector<Belief> two_state_grid(std::size_t points);

}  // namespace stopval
