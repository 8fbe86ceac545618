#pragma once

#include "cmot/constraint.hpp"
#include "cmot/grid.hpp"

namespace cmot {

struct TransportProblem {
    GridSpec grid;
    SpaceField rho0;
    SpaceField rho1;
    ConstraintSpec constraint;
};

// Iterate of the augmented Lagrangian methods. phi lives on time nodes,
// every other field on time slots.
struct SolverState {
    ScalarField phi;
    PairField q, p, b, mu, nu, eta;
    int iteration = 0;
    long inner_phi_iterations = 0;
    long inner_q_iterations = 0;

    SolverState() = default;
    explicit SolverState(const GridSpec& g)
        : phi(g), q(g), p(g), b(g), mu(g), nu(g), eta(g) {}
};

}  // namespace cmot
