#include "cmot/projection.hpp"

#include <cmath>
#include <stdexcept>

#include "cmot/parallel.hpp"

namespace cmot {

double projection_multiplier(const PairPoint& p) {
    const double b2 = p.b[0] * p.b[0] + p.b[1] * p.b[1];
    const double excess = p.a + 0.5 * b2;
    if (excess <= 0.0) return 1.0;
    // h(t) = t - (a+1) - |b|^2/(2t^2) is increasing and concave on t > 0 with
    // h(1) < 0 <= h(1 + excess), so Newton from t = 1 rises monotonically.
    double lo = 1.0;
    double hi = 1.0 + excess;
    double t = 1.0;
    for (int it = 0; it < 100; ++it) {
        const double h = t - (p.a + 1.0) - 0.5 * b2 / (t * t);
        if (h < 0.0) lo = t; else hi = t;
        if (h == 0.0) break;
        const double dh = 1.0 + b2 / (t * t * t);
        double next = t - h / dh;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * t) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

PairPoint project_k(const PairPoint& p) {
    const double b2 = p.b[0] * p.b[0] + p.b[1] * p.b[1];
    if (p.a + 0.5 * b2 <= 0.0) return p;
    const double t = projection_multiplier(p);
    PairPoint out;
    out.b = {p.b[0] / t, p.b[1] / t};
    out.a = -0.5 * (out.b[0] * out.b[0] + out.b[1] * out.b[1]);
    return out;
}

PairField solve_q(const PairField& b_field, const PairField& eta, double r) {
    require_same_grid(b_field.grid, eta.grid, "solve_q");
    if (!(r > 0.0)) throw std::invalid_argument("solve_q: r must be positive");
    PairField q(b_field.grid);
    const std::size_t n = b_field.component_size();
    const double* B0 = b_field.scalar().data();
    const double* B1 = b_field.vector(0).data();
    const double* B2 = b_field.vector(1).data();
    const double* E0 = eta.scalar().data();
    const double* E1 = eta.vector(0).data();
    const double* E2 = eta.vector(1).data();
    double* Q0 = q.scalar().data();
    double* Q1 = q.vector(0).data();
    double* Q2 = q.vector(1).data();
    parallel_for(n, 8192, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
            PairPoint pt{B0[m] + E0[m] / r, {B1[m] + E1[m] / r, B2[m] + E2[m] / r}};
            PairPoint pr = project_k(pt);
            Q0[m] = pr.a;
            Q1[m] = pr.b[0];
            Q2[m] = pr.b[1];
        }
    });
    return q;
}

}  // namespace cmot
