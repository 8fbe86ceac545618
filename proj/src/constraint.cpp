#include "cmot/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmot {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_space(const SpaceField& f, const GridSpec& g, const std::string& what, bool nonneg) {
    if (!f.matches(g)) throw ConstraintError(what + ": field size does not match the grid");
    for (double v : f.values) {
        if (!std::isfinite(v)) throw ConstraintError(what + ": non-finite value");
        if (nonneg && v < 0.0) throw ConstraintError(what + ": values must be >= 0");
    }
}

constexpr double kHardTol = 1e-9;

}  // namespace

std::string term_name(const ConstraintTerm& t) {
    return std::visit(overloaded{
                          [](const Unconstrained&) { return std::string("unconstrained"); },
                          [](const DensityUpperBound&) { return std::string("density_upper_bound"); },
                          [](const DensityLowerBound&) { return std::string("density_lower_bound"); },
                          [](const MomentumQuadraticPenalty&) { return std::string("momentum_penalty"); },
                          [](const FixedDensityRegion&) { return std::string("fixed_density"); },
                      },
                      t);
}

bool ConstraintSpec::empty() const {
    for (const auto& t : terms)
        if (!std::holds_alternative<Unconstrained>(t)) return false;
    return true;
}

void ConstraintSpec::validate(const GridSpec& g) const {
    const std::size_t P = g.plane();
    std::vector<int> upper(P, 0), lower(P, 0), fixed(P, 0), penalty(P, 0);
    std::vector<double> lo(P, -std::numeric_limits<double>::infinity());
    std::vector<double> hi(P, std::numeric_limits<double>::infinity());
    for (const auto& term : terms) {
        std::visit(overloaded{
                       [](const Unconstrained&) {},
                       [&](const DensityUpperBound& t) {
                           check_space(t.bound, g, "density_upper_bound", true);
                           for (std::size_t n = 0; n < P; ++n) {
                               ++upper[n];
                               hi[n] = t.bound.values[n];
                           }
                       },
                       [&](const DensityLowerBound& t) {
                           check_space(t.bound, g, "density_lower_bound", false);
                           for (std::size_t n = 0; n < P; ++n) {
                               ++lower[n];
                               lo[n] = t.bound.values[n];
                           }
                       },
                       [&](const MomentumQuadraticPenalty& t) {
                           check_space(t.psi, g, "momentum_penalty psi", true);
                           for (std::size_t n = 0; n < P; ++n)
                               if (t.psi.values[n] > 0.0) ++penalty[n];
                       },
                       [&](const FixedDensityRegion& t) {
                           check_space(t.value, g, "fixed_density value", true);
                           if (!t.mask.matches(g)) throw ConstraintError("fixed_density: mask size does not match the grid");
                           for (std::size_t n = 0; n < P; ++n)
                               if (t.mask.inside[n]) ++fixed[n];
                       },
                   },
                   term);
    }
    for (std::size_t n = 0; n < P; ++n) {
        if (upper[n] > 1) throw ConstraintError("more than one density_upper_bound term");
        if (lower[n] > 1) throw ConstraintError("more than one density_lower_bound term");
        if (penalty[n] > 1) throw ConstraintError("momentum_penalty terms have overlapping supports");
        if (fixed[n] > 1) throw ConstraintError("fixed_density regions overlap");
        if (fixed[n] && (upper[n] || lower[n]))
            throw ConstraintError("fixed_density region overlaps a density bound");
        if (lo[n] > hi[n]) throw ConstraintError("density_lower_bound exceeds density_upper_bound");
    }
}

void prox_mu_inplace(PairField& c, double s, const ConstraintSpec& spec) {
    if (!(s > 0.0)) throw std::invalid_argument("prox_mu: s must be positive");
    const GridSpec& g = c.grid;
    const std::size_t P = g.plane();
    const int slots = g.slots();
    auto rho = c.scalar();
    auto mx = c.vector(0);
    auto my = c.vector(1);
    for (const auto& term : spec.terms) {
        std::visit(overloaded{
                       [](const Unconstrained&) {},
                       [&](const DensityUpperBound& t) {
                           for (int i = 0; i < slots; ++i)
                               for (std::size_t n = 0; n < P; ++n)
                                   rho[i * P + n] = std::min(rho[i * P + n], t.bound.values[n]);
                       },
                       [&](const DensityLowerBound& t) {
                           for (int i = 0; i < slots; ++i)
                               for (std::size_t n = 0; n < P; ++n)
                                   rho[i * P + n] = std::max(rho[i * P + n], t.bound.values[n]);
                       },
                       [&](const MomentumQuadraticPenalty& t) {
                           for (std::size_t n = 0; n < P; ++n) {
                               const double f = s / (s + t.psi.values[n]);
                               if (f == 1.0) continue;
                               for (int i = 0; i < slots; ++i) {
                                   mx[i * P + n] *= f;
                                   my[i * P + n] *= f;
                               }
                           }
                       },
                       [&](const FixedDensityRegion& t) {
                           for (std::size_t n = 0; n < P; ++n) {
                               if (!t.mask.inside[n]) continue;
                               for (int i = 0; i < slots; ++i) rho[i * P + n] = t.value.values[n];
                           }
                       },
                   },
                   term);
    }
}

PairField prox_mu(const PairField& c, double s, const ConstraintSpec& spec) {
    PairField out = c;
    prox_mu_inplace(out, s, spec);
    return out;
}

PairField compute_target(const PairField& nu, const PairField& eta, const PairField& p, const PairField& b,
                         double s) {
    require_same_grid(nu.grid, eta.grid, "compute_target");
    require_same_grid(nu.grid, p.grid, "compute_target");
    require_same_grid(nu.grid, b.grid, "compute_target");
    if (!(s > 0.0)) throw std::invalid_argument("compute_target: s must be positive");
    PairField out(nu.grid);
    const double inv_s = 1.0 / s;
    for (std::size_t n = 0; n < out.data.size(); ++n)
        out.data[n] = 0.5 * (nu.data[n] + eta.data[n] + (p.data[n] - b.data[n]) * inv_s);
    return out;
}

double evaluate_I(const PairField& mu, const ConstraintSpec& spec) {
    const GridSpec& g = mu.grid;
    const std::size_t P = g.plane();
    const int slots = g.slots();
    auto rho = mu.scalar();
    auto mx = mu.vector(0);
    auto my = mu.vector(1);
    const double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& term : spec.terms) {
        double v = std::visit(
            overloaded{
                [](const Unconstrained&) { return 0.0; },
                [&](const DensityUpperBound& t) {
                    for (int i = 0; i < slots; ++i)
                        for (std::size_t n = 0; n < P; ++n)
                            if (rho[i * P + n] > t.bound.values[n] + kHardTol) return inf;
                    return 0.0;
                },
                [&](const DensityLowerBound& t) {
                    for (int i = 0; i < slots; ++i)
                        for (std::size_t n = 0; n < P; ++n)
                            if (rho[i * P + n] < t.bound.values[n] - kHardTol) return inf;
                    return 0.0;
                },
                [&](const MomentumQuadraticPenalty& t) {
                    double s = 0.0;
                    for (int i = 0; i < slots; ++i)
                        for (std::size_t n = 0; n < P; ++n) {
                            const std::size_t id = i * P + n;
                            s += t.psi.values[n] * (mx[id] * mx[id] + my[id] * my[id]);
                        }
                    return s * g.slot_weight();
                },
                [&](const FixedDensityRegion& t) {
                    for (std::size_t n = 0; n < P; ++n) {
                        if (!t.mask.inside[n]) continue;
                        for (int i = 0; i < slots; ++i)
                            if (std::abs(rho[i * P + n] - t.value.values[n]) > kHardTol) return inf;
                    }
                    return 0.0;
                },
            },
            term);
        total += v;
    }
    return total;
}

double hard_violation(const SpaceField& rho, const ConstraintSpec& spec) {
    double worst = 0.0;
    for (const auto& term : spec.terms) {
        std::visit(overloaded{
                       [](const Unconstrained&) {},
                       [](const MomentumQuadraticPenalty&) {},
                       [&](const DensityUpperBound& t) {
                           for (std::size_t n = 0; n < rho.size(); ++n)
                               worst = std::max(worst, rho.values[n] - t.bound.values[n]);
                       },
                       [&](const DensityLowerBound& t) {
                           for (std::size_t n = 0; n < rho.size(); ++n)
                               worst = std::max(worst, t.bound.values[n] - rho.values[n]);
                       },
                       [&](const FixedDensityRegion& t) {
                           for (std::size_t n = 0; n < rho.size(); ++n)
                               if (t.mask.inside[n]) worst = std::max(worst, std::abs(rho.values[n] - t.value.values[n]));
                       },
                   },
                   term);
    }
    return worst;
}

}  // namespace cmot
