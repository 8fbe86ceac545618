#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmot/diagnostics.hpp"
#include "cmot/poisson.hpp"
#include "cmot/state.hpp"

namespace cmot {

enum class Algorithm { Alg1, Alg2, Alg3 };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct SolverParams {
    double r = 1.0;
    double s = 1.0;
    double rho = 0.5;
    double rho_nu = 0.5;
    double rho_eta = 0.5;
    double rho_r = 0.4;
    double rho_s = 1.0;
    int max_outer = 5000;
    int max_inner = 200;
    // The stopping test is skipped before this many outer iterations.
    int min_outer = 10;
    double tol_density = 1e-3;
    double inner_tol = 1e-6;

    void validate() const;
};

enum class BoundStatus { Strict, Boundary, Violated };
std::string to_string(BoundStatus s);

struct StepSizeEntry {
    std::string label;
    double bound_value = 0.0;
    double supplied = 0.0;
    // bound_value - supplied for upper bounds; the inequality's left-hand side otherwise.
    double margin = 0.0;
    BoundStatus status = BoundStatus::Strict;
};

struct StepSizeReport {
    std::vector<StepSizeEntry> entries;
    bool any_violated() const;
    BoundStatus worst() const;
};

inline constexpr double kBoundTolerance = 1e-12;

// Outer step against (2rs^2 + s)/(1+rs)^2 and both sub-steps against 2r/(2rs+1).
StepSizeReport validate_alg1(const SolverParams& p);
// 2s - rho_r - rho_s s^2 - |rho_r r - rho_s s| > 0 and
// 2r - rho_r r^2 - rho_s - |rho_r r - rho_s s| > 0.
StepSizeReport validate_alg23(const SolverParams& p);
StepSizeReport validate_for(Algorithm a, const SolverParams& p);
// One message per Violated entry of validate_for.
std::vector<std::string> step_size_warnings(Algorithm a, const SolverParams& p);

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(int iteration, std::string field);
    int iteration() const { return iteration_; }
    const std::string& field() const { return field_; }

private:
    int iteration_;
    std::string field_;
};

enum class RunStatus { Converged, MaxIterations };

struct Solution {
    GridSpec grid;
    SolverState state;
    std::vector<IterationRecord> history;
    RunStatus status = RunStatus::MaxIterations;
    int iterations = 0;
    double energy = 0.0;
    StepSizeReport report;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;

    const PairField& mu() const { return state.mu; }
    const ScalarField& phi() const { return state.phi; }
};

// Density on the nt time nodes: rho0, slot averages, rho1.
std::vector<double> density_frames(const PairField& mu, const SpaceField& rho0, const SpaceField& rho1);

struct SubPhiResult {
    ScalarField phi;
    PairField nu;
    int iterations = 0;
};

struct SubQResult {
    PairField q;
    PairField eta;
    int iterations = 0;
};

using Observer = std::function<void(const IterationRecord&)>;

class Solver {
public:
    Solver(TransportProblem problem, SolverParams params);

    const TransportProblem& problem() const { return problem_; }
    const SolverParams& params() const { return params_; }

    // Density part of mu is the linear interpolation of rho0 and rho1 at
    // slot times, m = 0, nu = eta = mu, all other fields zero.
    SolverState initial_state() const;

    // argmin over phi of the augmented Lagrangian for fixed (nu, p).
    ScalarField solve_phi(const PairField& nu, const PairField& p) const;

    SubPhiResult alg1_sub_phi(const SolverState& st) const;
    SubQResult alg1_sub_q(const SolverState& st) const;

    void alg1_step(SolverState& st) const;
    void alg2_step(SolverState& st) const;
    void alg3_step(SolverState& st) const;
    void step(SolverState& st, Algorithm a) const;

    Solution run(Algorithm a, const Observer& observer = {}) const;
    Solution run_from(SolverState st, Algorithm a, const Observer& observer = {}) const;

private:
    void check_finite(const SolverState& st) const;

    TransportProblem problem_;
    SolverParams params_;
    PoissonSolver poisson_;
    ScalarField boundary_;
};

}  // namespace cmot
