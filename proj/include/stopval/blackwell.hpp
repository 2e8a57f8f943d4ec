#pragma once

#include <optional>

#include "stopval/belief.hpp"
#include "stopval/matrix.hpp"

namespace stopval {

enum class BlackwellRelation { S_dominates_T, T_dominates_S, equivalent, incomparable };

/// Outcome of comparing two information structures in the Blackwell order.
/// When a dominance relation holds, `witness` is a row-stochastic matrix M
/// with S*M = T (or T*M = S) up to `residual` in max norm.
struct BlackwellVerdict {
    BlackwellRelation relation = BlackwellRelation::incomparable;
    std::optional<Matrix> witness;
    double residual = 0.0;
};

const char* to_string(BlackwellRelation r);

/// Decides the Blackwell order between S and T by solving the linear
/// feasibility problem {M row-stochastic, M >= 0, S*M = T} in both directions
/// with an exact dense phase-1 simplex. Infeasibility is a verdict, not an
/// error. Structures must share the state count.
BlackwellVerdict blackwell_compare(const InfoStructure& s, const InfoStructure& t,
                                   double tol = 1e-9);

}  // namespace stopval
