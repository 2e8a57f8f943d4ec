#pragma once

#include <cstdint>
#include <vector>

#include "stopval/problem.hpp"
#include "stopval/solver.hpp"

namespace stopval {

/// Distribution of the period at which the decision maker stops under a given
/// policy. `never_mass` holds the probability of not stopping within the
/// support (the truncation remainder for infinite-horizon problems), treated
/// as mass at +infinity by the dominance checks.
struct StoppingTimeDist {
    enum class Source { exact, monte_carlo, closed_form };

    std::vector<double> pmf;  // index = period
    double never_mass = 0.0;
    Source source = Source::exact;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    // Conditional pmfs per initial state (exact sweeps only; empty otherwise).
    std::vector<std::vector<double>> pmf_by_state;

    std::vector<double> cdf() const;
    double total_mass() const;
};

/// Stationary or per-period stopping rule extracted from a solve.
class StopPolicy {
  public:
    static StopPolicy finite(const FiniteSolution& solution);
    static StopPolicy stationary(PwlcValue value);

    /// True when stopping (or the terminal wait-out) is what the policy does
    /// at this belief and period. Ties between stopping and acquiring stop.
    bool stops(const Belief& mu, int period, const StoppingProblem& problem,
               double tie_tol = 1e-9) const;

  private:
    bool stationary_ = false;
    std::vector<PwlcValue> layers_;
};

/// Forward belief sweep under the policy, merging equal beliefs, conditioning
/// on each initial state. Time-invariant states only (no transition).
StoppingTimeDist exact_distribution(const StoppingProblem& problem, const StopPolicy& policy,
                                    std::size_t n_max);

/// Seeded simulation; deterministic given the seed, with per-trial substreams
/// so any thread count accumulates identical counts. `threads` 0 picks up
/// STOPVAL_THREADS or the hardware count.
StoppingTimeDist simulate_distribution(const StoppingProblem& problem,
                                       const StopPolicy& policy, std::uint64_t trials,
                                       std::uint64_t seed, std::size_t n_max,
                                       unsigned threads = 0);

/// First-passage probabilities of a +-1 random walk (up probability p) to the
/// level +1: the walk can arrive only at odd periods, and
///   P(2n-1) = (2n-3)!!/n! * 2^(n-1) * p^n * (1-p)^(n-1),
/// with (-1)!! = 1. Returns the masses for n = 1..n_terms.
std::vector<double> random_walk_hitting_pmf(double p, std::size_t n_terms);

/// Stopping-time distribution of the one-step-threshold policy driven by a
/// symmetric binary structure: conditional on the favorable state the walk
/// moves up with probability p, conditional on the other with 1-p; the mixture
/// uses the prior weight mu0 on the favorable state.
StoppingTimeDist one_step_walk_distribution(double p, double mu0, std::size_t n_max);

enum class DominanceVerdict { P_dominates, Q_dominates, equal, neither };
const char* to_string(DominanceVerdict v);

/// First-order stochastic dominance on stopping times: P dominates (stops
/// later) when its CDF sits weakly below Q's everywhere and strictly below
/// somewhere beyond `tol`.
DominanceVerdict fosd_check(const StoppingTimeDist& p, const StoppingTimeDist& q, double tol);

/// Second-order check via running integrals of the CDFs, including the
/// infinite tail slope implied by never_mass.
DominanceVerdict ssd_check(const StoppingTimeDist& p, const StoppingTimeDist& q, double tol);

}  // namespace stopval
