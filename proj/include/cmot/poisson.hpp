#pragma once

#include <memory>
#include <stdexcept>

#include "cmot/grid.hpp"

namespace cmot {

class IncompatibleRhsError : public std::runtime_error {
public:
    IncompatibleRhsError(double defect, const std::string& what)
        : std::runtime_error(what), defect_(defect) {}
    double defect() const { return defect_; }

private:
    double defect_;
};

// Data of the potential subproblem: minimise over phi
//   G(phi) + <nu, B phi - p> + r/2 |B phi - p|^2
// with rhs_source = nu - r p. Its optimality condition is
//   -r lap(phi) = div(rhs_source) - boundary_source(rho0, rho1).
struct PoissonProblem {
    double r = 1.0;
    PairField rhs_source;
    SpaceField rho0;
    SpaceField rho1;
};

// Node field carrying the time-boundary data: 2*rho0/dt on the first slice,
// -2*rho1/dt on the last, zero elsewhere.
ScalarField boundary_source(const GridSpec& g, const SpaceField& rho0, const SpaceField& rho1);

// Spectral solver for -r lap(phi) = f with the operator of laplacian_ts.
// Space is diagonalised by DCT-II (Neumann) or real DFT (periodic); each
// spatial mode leaves a tridiagonal system in time solved directly.
// Plans are created once; solve() is const and re-entrant.
class PoissonSolver {
public:
    explicit PoissonSolver(const GridSpec& g);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    const GridSpec& grid() const;

    // Returns the zero-mean phi with -r lap(phi) = f. The weighted mean of f
    // is removed first when it is below 1e-6 of the weighted mean of |f|;
    // larger defects throw IncompatibleRhsError.
    ScalarField solve(const ScalarField& f, double r) const;

    ScalarField solve_phi(const PoissonProblem& problem) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ScalarField solve_phi(const PoissonProblem& problem);

// Weighted mean of a node field.
double weighted_mean(const ScalarField& f);

}  // namespace cmot
