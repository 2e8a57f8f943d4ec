#include "stopval/simplex.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace stopval {

namespace {

constexpr double kPivotEps = 1e-11;

// Full-tableau simplex over the given column subset. Dantzig pricing with a
// largest-pivot ratio tie-break for stability, falling back to Bland's rule
// after a while to rule out cycling. Returns false when the problem is
// unbounded in the allowed columns.
bool run_pivots(std::vector<std::vector<double>>& tab, std::vector<int>& basis,
                std::size_t allowed_cols) {
    const std::size_t m = basis.size();
    const std::size_t rhs = tab[0].size() - 1;
    constexpr long kBlandAfter = 500;
    auto& obj = tab[m];
    for (long iter = 0; iter < 100000; ++iter) {
        const bool bland = iter >= kBlandAfter;
        std::size_t enter = allowed_cols;
        if (bland) {
            for (std::size_t j = 0; j < allowed_cols; ++j)
                if (obj[j] < -kPivotEps) {
                    enter = j;
                    break;
                }
        } else {
            double most_negative = -kPivotEps;
            for (std::size_t j = 0; j < allowed_cols; ++j)
                if (obj[j] < most_negative) {
                    most_negative = obj[j];
                    enter = j;
                }
        }
        if (enter == allowed_cols) return true;  // optimal

        double min_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            if (tab[i][enter] > kPivotEps)
                min_ratio = std::min(min_ratio, tab[i][rhs] / tab[i][enter]);
        if (min_ratio == std::numeric_limits<double>::infinity()) return false;  // unbounded

        const double ratio_cut = min_ratio + 1e-9 * (1.0 + std::abs(min_ratio));
        std::size_t leave = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab[i][enter] <= kPivotEps) continue;
            if (tab[i][rhs] / tab[i][enter] > ratio_cut) continue;
            if (leave == m) {
                leave = i;
            } else if (bland) {
                if (basis[i] < basis[leave]) leave = i;
            } else if (tab[i][enter] > tab[leave][enter]) {
                leave = i;
            }
        }

        const double pivot = tab[leave][enter];
        for (double& v : tab[leave]) v /= pivot;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double factor = tab[i][enter];
            if (std::abs(factor) < 1e-300) continue;
            for (std::size_t j = 0; j <= rhs; ++j) tab[i][j] -= factor * tab[leave][j];
        }
        basis[leave] = int(enter);
    }
    throw std::runtime_error("simplex: pivot limit exceeded");
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double feasibility_tol) {
    const std::size_t m = lp.a.rows;
    const std::size_t n = lp.a.cols;
    if (lp.b.size() != m || lp.c.size() != n)
        throw std::invalid_argument("solve_lp: inconsistent dimensions");

    const std::size_t total = n + m;  // original vars + artificials
    const std::size_t rhs = total;
    std::vector<std::vector<double>> tab(m + 1, std::vector<double>(total + 1, 0.0));
    std::vector<int> basis(m);

    for (std::size_t i = 0; i < m; ++i) {
        const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab[i][j] = sign * lp.a(i, j);
        tab[i][n + i] = 1.0;
        tab[i][rhs] = sign * lp.b[i];
        basis[i] = int(n + i);
    }
    // Phase 1: minimize the artificial sum; price out the initial basis.
    // Artificials never re-enter once they leave, so only the original
    // columns are entering candidates.
    for (std::size_t j = 0; j <= rhs; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += tab[i][j];
        tab[m][j] = (j >= n && j < total) ? 0.0 : -s;
    }
    if (!run_pivots(tab, basis, n))
        throw std::runtime_error("simplex: phase 1 unbounded");

    const double infeas = -tab[m][rhs];
    if (std::abs(infeas) > feasibility_tol) return {LpStatus::infeasible, {}, infeas};

    // Drive leftover artificials out of the basis; drop redundant rows.
    std::vector<bool> redundant(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < int(n)) continue;
        std::size_t piv = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(tab[i][j]) > kPivotEps) {
                piv = j;
                break;
            }
        }
        if (piv == n) {
            redundant[i] = true;
            continue;
        }
        const double pivot = tab[i][piv];
        for (double& v : tab[i]) v /= pivot;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == i) continue;
            const double factor = tab[r][piv];
            if (std::abs(factor) < 1e-300) continue;
            for (std::size_t j = 0; j <= rhs; ++j) tab[r][j] -= factor * tab[i][j];
        }
        basis[i] = int(piv);
    }
    // Neutralize redundant rows so they can never pivot again.
    for (std::size_t i = 0; i < m; ++i) {
        if (!redundant[i]) continue;
        for (std::size_t j = 0; j < total; ++j) tab[i][j] = 0.0;
        tab[i][rhs] = 0.0;
    }

    // Phase 2 objective: reduced costs of the original objective.
    for (std::size_t j = 0; j <= rhs; ++j) tab[m][j] = j < n ? lp.c[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (redundant[i] || basis[i] >= int(n)) continue;
        const double cb = lp.c[basis[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= rhs; ++j) tab[m][j] -= cb * tab[i][j];
    }
    if (!run_pivots(tab, basis, n)) return {LpStatus::unbounded, {}, 0.0};

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (!redundant[i] && basis[i] < int(n)) sol.x[basis[i]] = tab[i][rhs];
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
    return sol;
}

}  // namespace stopval
