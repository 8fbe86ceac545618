#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cmot/grid.hpp"

namespace cmot {

class ConstraintError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Unconstrained {};

// rho(t,x) <= bound(x) at every time.
struct DensityUpperBound {
    SpaceField bound;
};

// rho(t,x) >= bound(x) at every time. Only active when configured.
struct DensityLowerBound {
    SpaceField bound;
};

// I(mu) = integral of psi(x) |m(t,x)|^2.
struct MomentumQuadraticPenalty {
    SpaceField psi;
};

// rho(t,x) = value(x) on the mask at every time.
struct FixedDensityRegion {
    SpaceMask mask;
    SpaceField value;
};

using ConstraintTerm =
    std::variant<Unconstrained, DensityUpperBound, DensityLowerBound, MomentumQuadraticPenalty, FixedDensityRegion>;

std::string term_name(const ConstraintTerm& t);

struct ConstraintSpec {
    std::vector<ConstraintTerm> terms;

    // Checks sizes, value signs and that no two terms act on the same
    // coordinate at the same point. An upper and a lower bound may share
    // points and compose into a clamp when lower <= upper.
    void validate(const GridSpec& g) const;
    bool empty() const;
};

// Pointwise argmin_mu s |mu - c|^2 + I(mu).
PairField prox_mu(const PairField& c, double s, const ConstraintSpec& spec);
void prox_mu_inplace(PairField& c, double s, const ConstraintSpec& spec);

// (nu + eta + (p - b)/s) / 2.
PairField compute_target(const PairField& nu, const PairField& eta, const PairField& p, const PairField& b,
                         double s);

// Penalty value; +infinity when a hard term is violated by more than 1e-9.
double evaluate_I(const PairField& mu, const ConstraintSpec& spec);

// Largest violation of the hard density terms by a spatial density
// (used to check the endpoint densities).
double hard_violation(const SpaceField& rho, const ConstraintSpec& spec);

}  // namespace cmot
