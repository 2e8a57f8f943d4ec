#pragma once

#include <cstddef>
#include <vector>

#include "stopval/errors.hpp"
#include "stopval/matrix.hpp"

namespace stopval {

inline constexpr double kProbTolerance = 1e-12;

/// Probability vector over the states of nature. Entries are validated to be
/// non-negative and to sum to one within 1e-12; degenerate beliefs (entries
/// exactly zero) are legal everywhere.
class Belief {
  public:
    explicit Belief(std::vector<double> probs);

    static Belief degenerate(std::size_t states, std::size_t which);
    static Belief uniform(std::size_t states);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }

    bool operator==(const Belief& o) const { return probs_ == o.probs_; }

  private:
    std::vector<double> probs_;
};

/// Signal likelihoods f_theta(s): one row per state, one column per signal.
/// Rows are validated to be probability distributions.
class InfoStructure {
  public:
    explicit InfoStructure(Matrix likelihoods);

    std::size_t states() const { return likelihoods_.rows; }
    std::size_t signals() const { return likelihoods_.cols; }
    double likelihood(std::size_t state, std::size_t signal) const {
        return likelihoods_(state, signal);
    }
    const Matrix& matrix() const { return likelihoods_; }

    /// True when every row is (numerically) the same, i.e. signals carry
    /// no information about the state.
    bool uninformative(double tol = 1e-12) const;

  private:
    Matrix likelihoods_;
};

/// Row-stochastic state transition matrix.
class MarkovTransition {
  public:
    explicit MarkovTransition(Matrix matrix);

    static MarkovTransition identity(std::size_t states) {
        return MarkovTransition(Matrix::identity(states));
    }

    std::size_t states() const { return matrix_.rows; }
    double operator()(std::size_t i, std::size_t j) const { return matrix_(i, j); }
    const Matrix& matrix() const { return matrix_; }
    bool is_identity(double tol = 0.0) const;

  private:
    Matrix matrix_;
};

/// Probability of each signal under belief mu: alpha_s = sum_theta mu_theta f_theta(s).
std::vector<double> signal_marginal(const Belief& mu, const InfoStructure& info);

/// Posterior after observing signal s. Throws ZeroProbabilitySignal when the
/// signal's marginal probability is <= 1e-15. The result is renormalized to
/// absorb rounding drift.
Belief bayes_update(const Belief& mu, const InfoStructure& info, std::size_t signal);

/// One-step belief drift under the transition: the row-vector product mu * tau.
Belief markov_push(const Belief& mu, const MarkovTransition& tau);

/// Fixed point of mu -> mu * tau. Requires every entry of tau strictly below 1
/// (contraction condition); throws NotContractive otherwise. The result
/// satisfies max-norm |mu* tau - mu*| <= tol.
Belief markov_fixed_point(const MarkovTransition& tau, double tol = 1e-12);

/// Post-processes signals of `info` through the row-stochastic matrix
/// `garbling`, producing the coarser structure S*M. Throws InvalidGarbling
/// when M is not row-stochastic within 1e-12.
InfoStructure garble(const InfoStructure& info, const Matrix& garbling);

}  // namespace stopval
