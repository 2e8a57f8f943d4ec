#include "stopval/wald.hpp"

#include <cmath>
#include <stdexcept>

#include "stopval/rng.hpp"

namespace stopval {

namespace {

double logit(double x) { return std::log(x / (1.0 - x)); }

}  // namespace

GaussianSetup::GaussianSetup(double th, double tl, double s, double mu0, double mu_bar)
    : theta_high(th), theta_low(tl), sigma(s), prior(mu0), threshold(mu_bar) {
    if (!(th > tl)) throw std::invalid_argument("gaussian setup: state values out of order");
    if (!(s > 0.0)) throw std::invalid_argument("gaussian setup: sigma must be positive");
    if (!(mu0 > 0.0) || !(mu0 < 1.0))
        throw std::invalid_argument("gaussian setup: prior outside (0,1)");
    if (!(mu_bar > 0.0) || !(mu_bar < 1.0))
        throw std::invalid_argument("gaussian setup: threshold outside (0,1)");
}

double GaussianSetup::increment_mean() const {
    const double gap = theta_high - theta_low;
    return gap * gap / (2.0 * sigma * sigma);
}

double GaussianSetup::increment_variance() const {
    const double gap = theta_high - theta_low;
    return gap * gap / (sigma * sigma);
}

double GaussianSetup::log_odds_prior() const { return logit(prior); }
double GaussianSetup::log_odds_threshold() const { return logit(threshold); }

WaldEstimate wald_expected_stopping(const GaussianSetup& setup, const WaldMode& mode) {
    if (setup.prior >= setup.threshold)
        throw InvalidSetup("wald_expected_stopping: prior already at or past the threshold");
    const double r0 = setup.log_odds_prior();
    const double r_bar = setup.log_odds_threshold();
    const double mean = setup.increment_mean();

    WaldEstimate est;
    if (mode.kind == WaldMode::Kind::zero_overshoot) {
        est.expected_stopping = (r_bar - r0) / mean;
        est.mean_eta = std::nan("");
        est.mean_r_stop = std::nan("");
        est.se_eta = std::nan("");
        return est;
    }

    if (mode.trials == 0)
        throw std::invalid_argument("wald_expected_stopping: monte_carlo needs trials >= 1");
    const double sd = std::sqrt(setup.increment_variance());
    const SplitRng master(mode.seed);
    double sum_eta = 0.0, sum_eta2 = 0.0, sum_r = 0.0;
    constexpr std::uint64_t kStepCap = 100000000;
    for (std::uint64_t t = 0; t < mode.trials; ++t) {
        SplitRng rng = master.substream(t);
        double r = r0;
        std::uint64_t steps = 0;
        while (r < r_bar && steps < kStepCap) {
            r += rng.next_normal(mean, sd);
            ++steps;
        }
        sum_eta += double(steps);
        sum_eta2 += double(steps) * double(steps);
        sum_r += r;
    }
    const double n = double(mode.trials);
    est.trials = mode.trials;
    est.mean_eta = sum_eta / n;
    est.mean_r_stop = sum_r / n;
    est.se_eta = std::sqrt(std::max(0.0, sum_eta2 / n - est.mean_eta * est.mean_eta) / n);
    est.expected_stopping = (est.mean_r_stop - r0) / mean;
    return est;
}

CrossingResult crossing_prior(const GaussianSetup& s, const GaussianSetup& t) {
    if (s.theta_high != t.theta_high || s.theta_low != t.theta_low)
        throw std::invalid_argument("crossing_prior: setups must share the state values");
    if (s.sigma > t.sigma)
        throw std::invalid_argument("crossing_prior: expected sigma_s <= sigma_t");
    if (s.threshold < t.threshold)
        throw std::invalid_argument("crossing_prior: expected threshold_s >= threshold_t");

    // E(eta_T) - E(eta_S) up to the common positive factor (theta gap)^-2;
    // linear in the prior's log odds, so at most one sign change exists.
    auto diff = [&](double mu0) {
        const double r0 = logit(mu0);
        const double es = 2.0 * s.sigma * s.sigma * (s.log_odds_threshold() - r0);
        const double et = 2.0 * t.sigma * t.sigma * (t.log_odds_threshold() - r0);
        return et - es;  // positive: the noisier source stops later
    };

    const double lo = 1e-9;
    const double hi = s.threshold - 1e-9;
    CrossingResult result;
    const int scan_points = 256;
    double prev = diff(lo);
    double bracket_lo = lo, bracket_hi = lo;
    for (int i = 1; i <= scan_points; ++i) {
        const double x = lo + (hi - lo) * double(i) / scan_points;
        const double d = diff(x);
        if ((prev > 0.0) != (d > 0.0) && prev != 0.0) {
            ++result.sign_changes;
            if (result.sign_changes == 1) {
                bracket_lo = lo + (hi - lo) * double(i - 1) / scan_points;
                bracket_hi = x;
            }
        }
        prev = d;
    }
    if (result.sign_changes == 0) return result;

    while (bracket_hi - bracket_lo > 1e-6) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        if ((diff(bracket_lo) > 0.0) == (diff(mid) > 0.0))
            bracket_lo = mid;
        else
            bracket_hi = mid;
    }
    result.outcome = CrossingResult::Outcome::found;
    result.prior = 0.5 * (bracket_lo + bracket_hi);

    // Report honestly when the sides do not behave as the closed form predicts.
    if (!(diff(0.5 * (lo + result.prior)) > 0.0) ||
        !(diff(0.5 * (result.prior + hi)) < 0.0)) {
        result.outcome = CrossingResult::Outcome::no_crossing;
        result.prior = 0.0;
    }
    return result;
}

}  // namespace stopval
