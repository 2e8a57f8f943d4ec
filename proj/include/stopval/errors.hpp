#pragma once

#include <stdexcept>

namespace stopval {

// Conditioning on a signal whose marginal probability is (numerically) zero.
struct ZeroProbabilitySignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Markov transition does not satisfy the contraction condition
// (some entry >= 1), so no fixed point is guaranteed.
struct NotContractive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Garbling matrix is not row-stochastic.
struct InvalidGarbling : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A history-tree solve would exceed the configured node budget.
struct TreeTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value iteration hit the sweep cap before reaching the target tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Discount factor outside (0, 1].
struct InvalidDiscount : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inconsistent analytic setup (e.g. prior already past the stopping threshold).
struct InvalidSetup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stopval
