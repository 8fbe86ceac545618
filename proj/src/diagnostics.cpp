#include "cmot/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cmot/poisson.hpp"

namespace cmot {

double energy(const PairField& mu) {
    auto rho = mu.scalar();
    auto mx = mu.vector(0);
    auto my = mu.vector(1);
    double s = 0.0;
    for (std::size_t n = 0; n < rho.size(); ++n) {
        if (rho[n] <= kVacuumDensity) continue;
        s += (mx[n] * mx[n] + my[n] * my[n]) / (2.0 * rho[n]);
    }
    return s * mu.grid.slot_weight();
}

ScalarField continuity_defect(const PairField& mu, const SpaceField& rho0, const SpaceField& rho1) {
    ScalarField d = div_ts(mu);
    ScalarField src = boundary_source(mu.grid, rho0, rho1);
    for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] -= src.values[n];
    return d;
}

double mass_per_slice_max_dev(const PairField& mu, const SpaceField& rho0) {
    const GridSpec& g = mu.grid;
    const double m0 = space_integral(rho0, g);
    const std::size_t P = g.plane();
    auto rho = mu.scalar();
    double worst = 0.0;
    for (int i = 0; i < g.slots(); ++i) {
        double s = 0.0;
        for (std::size_t n = 0; n < P; ++n) s += rho[i * P + n];
        worst = std::max(worst, std::abs(s * g.cell_area() - m0));
    }
    return worst;
}

double pair_distance(const PairField& a, const PairField& b) {
    require_same_grid(a.grid, b.grid, "pair_distance");
    double s = 0.0;
    for (std::size_t n = 0; n < a.data.size(); ++n) {
        const double d = a.data[n] - b.data[n];
        s += d * d;
    }
    return std::sqrt(s * a.grid.slot_weight());
}

IterationRecord residuals(const SolverState& state, const TransportProblem& problem,
                          std::optional<std::span<const double>> prev_density) {
    IterationRecord rec;
    rec.iteration = state.iteration;
    rec.energy = energy(state.mu);
    const PairField bphi = grad_ts(state.phi);
    rec.res_Bphi_p = pair_distance(bphi, state.p);
    rec.res_b_q = pair_distance(state.b, state.q);
    rec.res_mu_nu = pair_distance(state.mu, state.nu);
    rec.res_mu_eta = pair_distance(state.mu, state.eta);
    rec.res_Bphi_q = pair_distance(bphi, state.q);
    rec.continuity_residual = norm(continuity_defect(state.mu, problem.rho0, problem.rho1));
    rec.mass_per_slice_max_dev = mass_per_slice_max_dev(state.mu, problem.rho0);
    const double rho_norm = scalar_part_norm(state.mu);
    if (prev_density) {
        auto rho = state.mu.scalar();
        double s = 0.0;
        for (std::size_t n = 0; n < rho.size(); ++n) {
            const double d = rho[n] - (*prev_density)[n];
            s += d * d;
        }
        rec.density_change = std::sqrt(s * state.mu.grid.slot_weight());
        rec.density_change_rel = rho_norm > 0.0 ? rec.density_change / rho_norm : 0.0;
    }
    return rec;
}

void fill_relative(IterationRecord& rec, const IterationRecord& first) {
    auto rel = [](double v, double v0) { return v0 > 0.0 ? v / v0 : (v > 0.0 ? INFINITY : 0.0); };
    rec.rel_Bphi_p = rel(rec.res_Bphi_p, first.res_Bphi_p);
    rec.rel_b_q = rel(rec.res_b_q, first.res_b_q);
    rec.rel_mu_nu = rel(rec.res_mu_nu, first.res_mu_nu);
    rec.rel_mu_eta = rel(rec.res_mu_eta, first.res_mu_eta);
    rec.rel_Bphi_q = rel(rec.res_Bphi_q, first.res_Bphi_q);
    rec.rel_continuity = rel(rec.continuity_residual, first.continuity_residual);
}

}  // namespace cmot
