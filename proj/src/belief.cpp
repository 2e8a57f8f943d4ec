#include "stopval/belief.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stopval {

namespace {

void check_distribution(std::span<const double> v, const char* what) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= -kProbTolerance) || !std::isfinite(x))
            throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbTolerance)
        throw std::invalid_argument(std::string(what) + ": entries sum to " + std::to_string(sum) +
                                    ", expected 1");
}

std::vector<double> clamp_nonneg(std::vector<double> v) {
    for (double& x : v)
        if (x < 0.0) x = 0.0;
    return v;
}

}  // namespace

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("belief: empty probability vector");
    check_distribution(probs_, "belief");
    probs_ = clamp_nonneg(std::move(probs_));
}

Belief Belief::degenerate(std::size_t states, std::size_t which) {
    std::vector<double> p(states, 0.0);
    p.at(which) = 1.0;
    return Belief(std::move(p));
}

Belief Belief::uniform(std::size_t states) {
    return Belief(std::vector<double>(states, 1.0 / double(states)));
}

InfoStructure::InfoStructure(Matrix likelihoods) : likelihoods_(std::move(likelihoods)) {
    if (likelihoods_.rows == 0 || likelihoods_.cols == 0)
        throw std::invalid_argument("info structure: empty likelihood matrix");
    for (std::size_t r = 0; r < likelihoods_.rows; ++r)
        check_distribution(likelihoods_.row(r), "info structure row");
}

bool InfoStructure::uninformative(double tol) const {
    for (std::size_t r = 1; r < likelihoods_.rows; ++r)
        for (std::size_t c = 0; c < likelihoods_.cols; ++c)
            if (std::abs(likelihoods_(r, c) - likelihoods_(0, c)) > tol) return false;
    return true;
}

MarkovTransition::MarkovTransition(Matrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows == 0 || matrix_.rows != matrix_.cols)
        throw std::invalid_argument("transition: matrix must be square");
    for (std::size_t r = 0; r < matrix_.rows; ++r)
        check_distribution(matrix_.row(r), "transition row");
}

bool MarkovTransition::is_identity(double tol) const {
    for (std::size_t i = 0; i < matrix_.rows; ++i)
        for (std::size_t j = 0; j < matrix_.cols; ++j) {
            const double want = i == j ? 1.0 : 0.0;
            if (std::abs(matrix_(i, j) - want) > tol) return false;
        }
    return true;
}

std::vector<double> signal_marginal(const Belief& mu, const InfoStructure& info) {
    if (mu.size() != info.states())
        throw std::invalid_argument("signal_marginal: belief/info state counts differ");
    std::vector<double> alpha(info.signals(), 0.0);
    for (std::size_t s = 0; s < info.signals(); ++s)
        for (std::size_t t = 0; t < info.states(); ++t) alpha[s] += mu[t] * info.likelihood(t, s);
    return alpha;
}

Belief bayes_update(const Belief& mu, const InfoStructure& info, std::size_t signal) {
    if (signal >= info.signals()) throw std::invalid_argument("bayes_update: signal out of range");
    double alpha = 0.0;
    std::vector<double> post(mu.size());
    for (std::size_t t = 0; t < mu.size(); ++t) {
        post[t] = mu[t] * info.likelihood(t, signal);
        alpha += post[t];
    }
    if (alpha <= 1e-15)
        throw ZeroProbabilitySignal("bayes_update: conditioning on a zero-probability signal");
    for (double& p : post) p /= alpha;
    // Renormalize once more to absorb rounding drift.
    double sum = 0.0;
    for (double p : post) sum += p;
    for (double& p : post) p /= sum;
    return Belief(std::move(post));
}

Belief markov_push(const Belief& mu, const MarkovTransition& tau) {
    if (mu.size() != tau.states())
        throw std::invalid_argument("markov_push: belief/transition state counts differ");
    std::vector<double> out(mu.size(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double w = mu[i];
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < mu.size(); ++j) out[j] += w * tau(i, j);
    }
    double sum = 0.0;
    for (double p : out) sum += p;
    for (double& p : out) p /= sum;
    return Belief(std::move(out));
}

Belief markov_fixed_point(const MarkovTransition& tau, double tol) {
    for (std::size_t i = 0; i < tau.states(); ++i)
        for (std::size_t j = 0; j < tau.states(); ++j)
            if (tau(i, j) >= 1.0)
                throw NotContractive("markov_fixed_point: transition entry >= 1");
    Belief mu = Belief::uniform(tau.states());
    for (int iter = 0; iter < 1000000; ++iter) {
        Belief next = markov_push(mu, tau);
        double delta = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            delta = std::max(delta, std::abs(next[i] - mu[i]));
        mu = next;
        if (delta <= tol * 0.5) break;
    }
    return mu;
}

InfoStructure garble(const InfoStructure& info, const Matrix& garbling) {
    if (garbling.rows != info.signals())
        throw InvalidGarbling("garble: matrix row count must equal the signal count");
    for (std::size_t r = 0; r < garbling.rows; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < garbling.cols; ++c) {
            if (garbling(r, c) < -kProbTolerance)
                throw InvalidGarbling("garble: negative entry");
            sum += garbling(r, c);
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            throw InvalidGarbling("garble: row does not sum to 1");
    }
    return InfoStructure(multiply(info.matrix(), garbling));
}

}  // namespace stopval
