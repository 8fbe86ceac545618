#include "cmot/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cmot/projection.hpp"

namespace cmot {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Alg1: return "alg1";
        case Algorithm::Alg2: return "alg2";
        case Algorithm::Alg3: return "alg3";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "alg1" || name == "1") return Algorithm::Alg1;
    if (name == "alg2" || name == "2") return Algorithm::Alg2;
    if (name == "alg3" || name == "3") return Algorithm::Alg3;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected alg1, alg2 or alg3)");
}

std::string to_string(BoundStatus s) {
    switch (s) {
        case BoundStatus::Strict: return "Strict";
        case BoundStatus::Boundary: return "Boundary";
        case BoundStatus::Violated: return "Violated";
    }
    return "?";
}

void SolverParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(r, "r");
    positive(s, "s");
    positive(tol_density, "tol_density");
    positive(inner_tol, "inner_tol");
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be >= 0");
    };
    nonneg(rho, "rho");
    nonneg(rho_nu, "rho_nu");
    nonneg(rho_eta, "rho_eta");
    nonneg(rho_r, "rho_r");
    nonneg(rho_s, "rho_s");
    if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
    if (max_inner < 1) throw std::invalid_argument("max_inner must be >= 1");
    if (min_outer < 1) throw std::invalid_argument("min_outer must be >= 1");
}

bool StepSizeReport::any_violated() const { return worst() == BoundStatus::Violated; }

BoundStatus StepSizeReport::worst() const {
    BoundStatus w = BoundStatus::Strict;
    for (const auto& e : entries) w = std::max(w, e.status);
    return w;
}

namespace {

BoundStatus classify(double margin) {
    if (margin > kBoundTolerance) return BoundStatus::Strict;
    if (margin >= -kBoundTolerance) return BoundStatus::Boundary;
    return BoundStatus::Violated;
}

StepSizeEntry upper_bound_entry(std::string label, double bound, double supplied) {
    StepSizeEntry e{std::move(label), bound, supplied, bound - supplied, BoundStatus::Strict};
    e.status = supplied <= 0.0 ? BoundStatus::Violated : classify(e.margin);
    return e;
}

}  // namespace

StepSizeReport validate_alg1(const SolverParams& p) {
    const double r = p.r, s = p.s;
    const double outer = (2.0 * r * s * s + s) / ((1.0 + r * s) * (1.0 + r * s));
    const double inner = 2.0 * r / (2.0 * r * s + 1.0);
    StepSizeReport rep;
    rep.entries.push_back(upper_bound_entry("rho", outer, p.rho));
    rep.entries.push_back(upper_bound_entry("rho_nu", inner, p.rho_nu));
    rep.entries.push_back(upper_bound_entry("rho_eta", inner, p.rho_eta));
    return rep;
}

StepSizeReport validate_alg23(const SolverParams& p) {
    const double r = p.r, s = p.s, a = p.rho_r, b = p.rho_s;
    const double cross = std::abs(a * r - b * s);
    const double lhs1 = 2.0 * s - a - b * s * s - cross;
    const double lhs2 = 2.0 * r - a * r * r - b - cross;
    StepSizeReport rep;
    rep.entries.push_back({"condition_1", 0.0, lhs1, lhs1, classify(lhs1)});
    rep.entries.push_back({"condition_2", 0.0, lhs2, lhs2, classify(lhs2)});
    if (a <= 0.0 || b <= 0.0) {
        for (auto& e : rep.entries) e.status = BoundStatus::Violated;
    }
    return rep;
}

StepSizeReport validate_for(Algorithm a, const SolverParams& p) {
    return a == Algorithm::Alg1 ? validate_alg1(p) : validate_alg23(p);
}

NonFiniteError::NonFiniteError(int iteration, std::string field)
    : std::runtime_error("non-finite value in field '" + field + "' at iteration " + std::to_string(iteration)),
      iteration_(iteration),
      field_(std::move(field)) {}

std::vector<double> density_frames(const PairField& mu, const SpaceField& rho0, const SpaceField& rho1) {
    const GridSpec& g = mu.grid;
    const std::size_t P = g.plane();
    std::vector<double> out(g.node_count());
    auto rho = mu.scalar();
    std::copy(rho0.values.begin(), rho0.values.end(), out.begin());
    for (int i = 1; i < g.nt - 1; ++i)
        for (std::size_t n = 0; n < P; ++n) out[i * P + n] = 0.5 * (rho[(i - 1) * P + n] + rho[i * P + n]);
    std::copy(rho1.values.begin(), rho1.values.end(), out.begin() + (g.nt - 1) * P);
    return out;
}

Solver::Solver(TransportProblem problem, SolverParams params)
    : problem_(std::move(problem)), params_(params), poisson_(problem_.grid) {
    params_.validate();
    const GridSpec& g = problem_.grid;
    if (!problem_.rho0.matches(g) || !problem_.rho1.matches(g))
        throw GridError("solver: density size does not match the grid");
    problem_.constraint.validate(g);
    boundary_ = boundary_source(g, problem_.rho0, problem_.rho1);
}

SolverState Solver::initial_state() const {
    const GridSpec& g = problem_.grid;
    SolverState st(g);
    const std::size_t P = g.plane();
    auto rho = st.mu.scalar();
    for (int i = 0; i < g.slots(); ++i) {
        const double t = (i + 0.5) * g.dt();
        for (std::size_t n = 0; n < P; ++n)
            rho[i * P + n] = (1.0 - t) * problem_.rho0.values[n] + t * problem_.rho1.values[n];
    }
    st.nu = st.mu;
    st.eta = st.mu;
    return st;
}

ScalarField Solver::solve_phi(const PairField& nu, const PairField& p) const {
    PairField src(problem_.grid);
    axpby(src, 1.0, nu, -params_.r, p);
    ScalarField f = div_ts(src);
    for (std::size_t n = 0; n < f.values.size(); ++n) f.values[n] -= boundary_.values[n];
    return poisson_.solve(f, params_.r);
}

SubPhiResult Solver::alg1_sub_phi(const SolverState& st) const {
    const double s = params_.s;
    SubPhiResult res{ScalarField(problem_.grid), st.nu, 0};
    const std::size_t N = res.nu.data.size();
    const double w = problem_.grid.slot_weight();
    for (int k = 0; k < params_.max_inner; ++k) {
        res.phi = solve_phi(res.nu, st.p);
        const PairField bphi = grad_ts(res.phi);
        double change = 0.0, size = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double v = res.nu.data[n];
            const double d = params_.rho_nu * (bphi.data[n] - st.p.data[n] - s * (v - st.mu.data[n]));
            res.nu.data[n] = v + d;
            change += d * d;
            size += res.nu.data[n] * res.nu.data[n];
        }
        ++res.iterations;
        if (std::sqrt(change * w) <= params_.inner_tol * std::sqrt(size * w)) break;
    }
    return res;
}

SubQResult Solver::alg1_sub_q(const SolverState& st) const {
    const double s = params_.s;
    SubQResult res{PairField(problem_.grid), st.eta, 0};
    const std::size_t N = res.eta.data.size();
    const double w = problem_.grid.slot_weight();
    for (int k = 0; k < params_.max_inner; ++k) {
        res.q = solve_q(st.b, res.eta, params_.r);
        double change = 0.0, size = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double v = res.eta.data[n];
            const double d = params_.rho_eta * (st.b.data[n] - res.q.data[n] - s * (v - st.mu.data[n]));
            res.eta.data[n] = v + d;
            change += d * d;
            size += res.eta.data[n] * res.eta.data[n];
        }
        ++res.iterations;
        if (std::sqrt(change * w) <= params_.inner_tol * std::sqrt(size * w)) break;
    }
    return res;
}

void Solver::alg1_step(SolverState& st) const {
    const double relax = params_.rho * (params_.r + 1.0 / params_.s);
    SubPhiResult sp = alg1_sub_phi(st);
    st.phi = std::move(sp.phi);
    st.nu = std::move(sp.nu);
    st.inner_phi_iterations += sp.iterations;
    const PairField bphi = grad_ts(st.phi);
    for (std::size_t n = 0; n < st.p.data.size(); ++n) st.p.data[n] -= relax * (st.p.data[n] - bphi.data[n]);

    SubQResult sq = alg1_sub_q(st);
    st.q = std::move(sq.q);
    st.eta = std::move(sq.eta);
    st.inner_q_iterations += sq.iterations;
    for (std::size_t n = 0; n < st.b.data.size(); ++n) st.b.data[n] -= relax * (st.b.data[n] - st.q.data[n]);

    st.mu = compute_target(st.nu, st.eta, st.p, st.b, params_.s);
    prox_mu_inplace(st.mu, params_.s, problem_.constraint);
    ++st.iteration;
}

namespace {

// p' = p - rho_r (mu - nu + r (p - x)), nu' = nu + rho_s (x - p - s (nu - mu)),
// evaluated with the old values on the right.
void dual_pair_update(PairField& p, PairField& nu, const PairField& x, const PairField& mu, const SolverParams& prm) {
    for (std::size_t n = 0; n < p.data.size(); ++n) {
        const double pv = p.data[n], nv = nu.data[n], xv = x.data[n], mv = mu.data[n];
        p.data[n] = pv - prm.rho_r * (mv - nv + prm.r * (pv - xv));
        nu.data[n] = nv + prm.rho_s * (xv - pv - prm.s * (nv - mv));
    }
}

// b' = b - rho_r (eta - mu + r (b - q)), eta' = eta + rho_s (b - q - s (eta - mu)).
void primal_pair_update(PairField& b, PairField& eta, const PairField& q, const PairField& mu, const SolverParams& prm) {
    for (std::size_t n = 0; n < b.data.size(); ++n) {
        const double bv = b.data[n], ev = eta.data[n], qv = q.data[n], mv = mu.data[n];
        b.data[n] = bv - prm.rho_r * (ev - mv + prm.r * (bv - qv));
        eta.data[n] = ev + prm.rho_s * (bv - qv - prm.s * (ev - mv));
    }
}

}  // namespace

void Solver::alg2_step(SolverState& st) const {
    st.phi = solve_phi(st.nu, st.p);
    const PairField bphi = grad_ts(st.phi);
    st.q = solve_q(st.b, st.eta, params_.r);
    dual_pair_update(st.p, st.nu, bphi, st.mu, params_);
    primal_pair_update(st.b, st.eta, st.q, st.mu, params_);
    st.mu = compute_target(st.nu, st.eta, st.p, st.b, params_.s);
    prox_mu_inplace(st.mu, params_.s, problem_.constraint);
    ++st.iteration;
}

void Solver::alg3_step(SolverState& st) const {
    st.phi = solve_phi(st.nu, st.p);
    const PairField bphi = grad_ts(st.phi);
    dual_pair_update(st.p, st.nu, bphi, st.mu, params_);
    PairField half = compute_target(st.nu, st.eta, st.p, st.b, params_.s);
    prox_mu_inplace(half, params_.s, problem_.constraint);
    st.q = solve_q(st.b, st.eta, params_.r);
    primal_pair_update(st.b, st.eta, st.q, half, params_);
    st.mu = compute_target(st.nu, st.eta, st.p, st.b, params_.s);
    prox_mu_inplace(st.mu, params_.s, problem_.constraint);
    ++st.iteration;
}

void Solver::step(SolverState& st, Algorithm a) const {
    switch (a) {
        case Algorithm::Alg1: alg1_step(st); break;
        case Algorithm::Alg2: alg2_step(st); break;
        case Algorithm::Alg3: alg3_step(st); break;
    }
}

void Solver::check_finite(const SolverState& st) const {
    const std::pair<const char*, std::span<const double>> fields[] = {
        {"phi", st.phi.values}, {"mu", st.mu.data}, {"nu", st.nu.data}, {"eta", st.eta.data},
        {"p", st.p.data},       {"b", st.b.data},   {"q", st.q.data},
    };
    for (const auto& [name, values] : fields)
        if (!all_finite(values)) throw NonFiniteError(st.iteration, name);
}

std::vector<std::string> step_size_warnings(Algorithm a, const SolverParams& params) {
    std::vector<std::string> out;
    for (const auto& e : validate_for(a, params).entries) {
        if (e.status != BoundStatus::Violated) continue;
        std::ostringstream os;
        os << to_string(a) << " step size " << e.label << " violates its convergence condition (supplied "
           << e.supplied << ", margin " << e.margin << "); the iteration may diverge";
        out.push_back(os.str());
    }
    return out;
}

Solution Solver::run(Algorithm a, const Observer& observer) const { return run_from(initial_state(), a, observer); }

Solution Solver::run_from(SolverState st, Algorithm a, const Observer& observer) const {
    const auto start = std::chrono::steady_clock::now();
    Solution sol;
    sol.grid = problem_.grid;
    sol.report = validate_for(a, params_);
    sol.warnings = step_size_warnings(a, params_);

    std::vector<double> prev(st.mu.scalar().begin(), st.mu.scalar().end());
    const int first_iteration = st.iteration;
    while (st.iteration - first_iteration < params_.max_outer) {
        step(st, a);
        check_finite(st);
        IterationRecord rec = residuals(st, problem_, std::span<const double>(prev));
        if (sol.history.empty()) fill_relative(rec, rec); else fill_relative(rec, sol.history.front());
        sol.history.push_back(rec);
        if (observer) observer(rec);
        auto rho = st.mu.scalar();
        std::copy(rho.begin(), rho.end(), prev.begin());
        if (st.iteration - first_iteration >= params_.min_outer && rec.density_change < params_.tol_density) {
            sol.status = RunStatus::Converged;
            break;
        }
    }
    sol.iterations = st.iteration - first_iteration;
    sol.energy = energy(st.mu);
    sol.state = std::move(st);
    sol.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

}  // namespace cmot
