#include "stopval/blackwell.hpp"

#include <cmath>
#include <stdexcept>

#include "stopval/simplex.hpp"

namespace stopval {

namespace {

// Feasibility of {M >= 0, M 1 = 1, S M = T}; returns the witness on success.
std::optional<Matrix> find_garbling(const Matrix& s, const Matrix& t, double tol) {
    const std::size_t m = s.rows;
    const std::size_t ks = s.cols;
    const std::size_t kt = t.cols;

    // Shortcut keeps the witness exact (and the identity) when S already
    // equals T entry for entry.
    if (ks == kt) {
        bool same = true;
        for (std::size_t i = 0; i < s.data.size() && same; ++i)
            same = std::abs(s.data[i] - t.data[i]) <= tol;
        if (same) return Matrix::identity(ks);
    }

    const std::size_t nvars = ks * kt;
    const std::size_t nrows = ks + m * kt;
    LinearProgram lp;
    lp.a = Matrix(nrows, nvars);
    lp.b.assign(nrows, 0.0);
    lp.c.assign(nvars, 0.0);

    // Row-stochasticity: sum_j M(i,j) = 1.
    for (std::size_t i = 0; i < ks; ++i) {
        for (std::size_t j = 0; j < kt; ++j) lp.a(i, i * kt + j) = 1.0;
        lp.b[i] = 1.0;
    }
    // Garbling identity: sum_s S(r,s) M(s,j) = T(r,j).
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < kt; ++j) {
            const std::size_t row = ks + r * kt + j;
            for (std::size_t sig = 0; sig < ks; ++sig) lp.a(row, sig * kt + j) = s(r, sig);
            lp.b[row] = t(r, j);
        }

    const LpSolution sol = solve_lp(lp, tol);
    if (sol.status != LpStatus::optimal) return std::nullopt;

    Matrix witness(ks, kt);
    for (std::size_t i = 0; i < ks; ++i)
        for (std::size_t j = 0; j < kt; ++j) witness(i, j) = sol.x[i * kt + j];
    if (max_abs_diff(multiply(s, witness), t) > tol) return std::nullopt;
    return witness;
}

double garbling_residual(const Matrix& s, const Matrix& witness, const Matrix& t) {
    return max_abs_diff(multiply(s, witness), t);
}

}  // namespace

const char* to_string(BlackwellRelation r) {
    switch (r) {
        case BlackwellRelation::S_dominates_T: return "S_dominates_T";
        case BlackwellRelation::T_dominates_S: return "T_dominates_S";
        case BlackwellRelation::equivalent: return "equivalent";
        case BlackwellRelation::incomparable: return "incomparable";
    }
    return "?";
}

BlackwellVerdict blackwell_compare(const InfoStructure& s, const InfoStructure& t, double tol) {
    if (s.states() != t.states())
        throw std::invalid_argument("blackwell_compare: structures have different state counts");

    const auto forward = find_garbling(s.matrix(), t.matrix(), tol);
    const auto backward = find_garbling(t.matrix(), s.matrix(), tol);

    BlackwellVerdict verdict;
    if (forward && backward) {
        verdict.relation = BlackwellRelation::equivalent;
        verdict.witness = *forward;
        verdict.residual = garbling_residual(s.matrix(), *forward, t.matrix());
    } else if (forward) {
        verdict.relation = BlackwellRelation::S_dominates_T;
        verdict.witness = *forward;
        verdict.residual = garbling_residual(s.matrix(), *forward, t.matrix());
    } else if (backward) {
        verdict.relation = BlackwellRelation::T_dominates_S;
        verdict.witness = *backward;
        verdict.residual = garbling_residual(t.matrix(), *backward, s.matrix());
    } else {
        verdict.relation = BlackwellRelation::incomparable;
    }
    return verdict;
}

}  // namespace stopval
