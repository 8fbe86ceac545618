#pragma once

#include <array>

#include "cmot/grid.hpp"

namespace cmot {

struct PairPoint {
    double a = 0.0;
    std::array<double, 2> b{0.0, 0.0};
};

// Euclidean projection onto K = {(a,b) : a + |b|^2/2 <= 0}.
// Outside K the result is (-|b/t|^2/2, b/t) where t >= 1 is the unique root
// of t^3 - (a+1) t^2 - |b|^2/2.
PairPoint project_k(const PairPoint& p);

// Multiplier t of the projection (1 for points of K).
double projection_multiplier(const PairPoint& p);

// Pointwise project_k of b_field + eta/r.
PairField solve_q(const PairField& b_field, const PairField& eta, double r);

}  // namespace cmot
