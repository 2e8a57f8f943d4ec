#pragma once

#include <cstdint>

#include "stopval/errors.hpp"

namespace stopval {

/// Two-point state with Gaussian signals s ~ N(theta, sigma^2) and an
/// infinite-horizon policy characterized by a single belief threshold. The
/// log-likelihood ratio of the belief then performs a Gaussian random walk
/// with increment mean (theta_high-theta_low)^2/(2 sigma^2) conditional on the
/// high state.
struct GaussianSetup {
    double theta_high;
    double theta_low;
    double sigma;
    double prior;      // probability of the high state
    double threshold;  // stopping threshold on the same probability scale

    GaussianSetup(double th, double tl, double s, double mu0, double mu_bar);

    double increment_mean() const;      // conditional on the high state
    double increment_variance() const;
    double log_odds_prior() const;
    double log_odds_threshold() const;
};

struct WaldMode {
    enum class Kind { zero_overshoot, monte_carlo };
    Kind kind = Kind::zero_overshoot;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    static WaldMode zero_overshoot() { return {}; }
    static WaldMode monte_carlo(std::uint64_t trials, std::uint64_t seed) {
        return {Kind::monte_carlo, trials, seed};
    }
};

/// Expected periods until the log-odds walk first crosses the threshold,
/// conditional on the high state, via the stopped-sum identity
///   E(eta) = (E(r_stop) - r_0) / increment_mean.
/// zero_overshoot approximates E(r_stop) by the threshold itself; monte_carlo
/// simulates the walk and reports the identity value at the estimated
/// E(r_stop), exposing the raw averages for consistency checks.
struct WaldEstimate {
    double expected_stopping = 0.0;  // the headline value
    // Monte Carlo diagnostics (NaN / 0 in zero_overshoot mode).
    double mean_eta = 0.0;
    double mean_r_stop = 0.0;
    double se_eta = 0.0;
    std::uint64_t trials = 0;
};

WaldEstimate wald_expected_stopping(const GaussianSetup& setup, const WaldMode& mode);

/// Prior level at which the expected stopping times of two setups cross.
/// Expects shared state values, sigma_s <= sigma_t and threshold_s >=
/// threshold_t; below the crossing the noisier source stops later, above it
/// earlier. An everywhere-constant sign is reported, not thrown.
struct CrossingResult {
    enum class Outcome { found, no_crossing };
    Outcome outcome = Outcome::no_crossing;
    double prior = 0.0;
    int sign_changes = 0;
};

CrossingResult crossing_prior(const GaussianSetup& s, const GaussianSetup& t);

}  // namespace stopval
