#pragma once

#include <vector>

#include "stopval/matrix.hpp"

namespace stopval {

/// Linear program in standard form: min c.x subject to A x = b, x >= 0.
/// Rows with negative b are negated internally.
struct LinearProgram {
    Matrix a;
    std::vector<double> b;
    std::vector<double> c;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// Dense two-phase tableau simplex with Bland's rule. Intended for the tiny
/// problems this library produces (dozens of variables); robustness over speed.
LpSolution solve_lp(const LinearProgram& lp, double feasibility_tol = 1e-9);

}  // namespace stopval
