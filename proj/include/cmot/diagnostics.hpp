#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cmot/state.hpp"

namespace cmot {

// One row of convergence history. Residual norms use the slot-weighted L2
// norm. The rel_ columns divide by the value recorded at the first
// iteration.
struct IterationRecord {
    int iteration = 0;
    double energy = 0.0;
    double res_Bphi_p = 0.0;
    double res_b_q = 0.0;
    double res_mu_nu = 0.0;
    double res_mu_eta = 0.0;
    double res_Bphi_q = 0.0;
    double continuity_residual = 0.0;
    double density_change = 0.0;
    double density_change_rel = 0.0;
    double mass_per_slice_max_dev = 0.0;
    double rel_Bphi_p = 1.0;
    double rel_b_q = 1.0;
    double rel_mu_nu = 1.0;
    double rel_mu_eta = 1.0;
    double rel_Bphi_q = 1.0;
    double rel_continuity = 1.0;
};

// Densities at or below this value count as vacuum in the energy.
inline constexpr double kVacuumDensity = 1e-8;

// Sum over slots of |m|^2/(2 rho) times dt dx dy; vacuum points contribute 0.
double energy(const PairField& mu);

// Node field div_ts(mu) minus the time-boundary source, i.e. the discrete
// continuity equation with rho0, rho1 as end data.
ScalarField continuity_defect(const PairField& mu, const SpaceField& rho0, const SpaceField& rho1);

// Largest deviation of a slot's mass from the mass of rho0.
double mass_per_slice_max_dev(const PairField& mu, const SpaceField& rho0);

// Fills every absolute column of the record. density_change is measured
// against prev_density (slot scalar part of the previous mu) when given.
IterationRecord residuals(const SolverState& state, const TransportProblem& problem,
                          std::optional<std::span<const double>> prev_density = std::nullopt);

// Fills the rel_ columns of rec against first.
void fill_relative(IterationRecord& rec, const IterationRecord& first);

double pair_distance(const PairField& a, const PairField& b);

}  // namespace cmot
