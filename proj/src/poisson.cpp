#include "cmot/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "cmot/parallel.hpp"

namespace cmot {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> space_symbol(int n, double h, SpaceBc bc) {
    std::vector<double> lam(n);
    const double k0 = bc == SpaceBc::Periodic ? 2.0 * std::numbers::pi / n : std::numbers::pi / n;
    for (int p = 0; p < n; ++p) lam[p] = (2.0 - 2.0 * std::cos(k0 * p)) / (h * h);
    return lam;
}

}  // namespace

struct PoissonSolver::Impl {
    GridSpec grid;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    double norm = 1.0;
    std::vector<double> lambda;

    explicit Impl(const GridSpec& g) : grid(g) {
        g.validate();
        const bool periodic = g.space_bc == SpaceBc::Periodic;
        auto lx = space_symbol(g.nx, g.dx(), g.space_bc);
        auto ly = space_symbol(g.ny, g.dy(), g.space_bc);
        lambda.resize(g.plane());
        for (int j = 0; j < g.nx; ++j)
            for (int k = 0; k < g.ny; ++k) lambda[static_cast<std::size_t>(j) * g.ny + k] = lx[j] + ly[k];
        norm = periodic ? 1.0 / (static_cast<double>(g.nx) * g.ny)
                        : 1.0 / (4.0 * static_cast<double>(g.nx) * g.ny);

        std::vector<double> scratch(g.plane());
        fftw_r2r_kind fk = periodic ? FFTW_R2HC : FFTW_REDFT10;
        fftw_r2r_kind bk = periodic ? FFTW_HC2R : FFTW_REDFT01;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::lock_guard<std::mutex> lock(planner_mutex());
        forward = fftw_plan_r2r_2d(g.nx, g.ny, scratch.data(), scratch.data(), fk, fk, flags);
        backward = fftw_plan_r2r_2d(g.nx, g.ny, scratch.data(), scratch.data(), bk, bk, flags);
        if (!forward || !backward) throw std::runtime_error("poisson: FFTW plan creation failed");
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

PoissonSolver::PoissonSolver(const GridSpec& g) : impl_(std::make_unique<Impl>(g)) {}
PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

const GridSpec& PoissonSolver::grid() const { return impl_->grid; }

double weighted_mean(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const std::size_t P = g.plane();
    double total = 0.0, weight = 0.0;
    for (int i = 0; i < g.nt; ++i) {
        double s = 0.0;
        for (std::size_t n = 0; n < P; ++n) s += f.values[i * P + n];
        total += g.node_time_weight(i) * s;
        weight += g.node_time_weight(i) * static_cast<double>(P);
    }
    return total / weight;
}

ScalarField PoissonSolver::solve(const ScalarField& f, double r) const {
    const GridSpec& g = impl_->grid;
    require_same_grid(g, f.grid, "poisson solve");
    if (!(r > 0.0)) throw std::invalid_argument("poisson solve: r must be positive");
    const std::size_t P = g.plane();
    const int nt = g.nt;
    const double dt = g.dt();

    double mean = weighted_mean(f);
    double abs_mean = 0.0, weight = 0.0;
    for (int i = 0; i < nt; ++i) {
        double s = 0.0;
        for (std::size_t n = 0; n < P; ++n) s += std::abs(f.values[i * P + n]);
        abs_mean += g.node_time_weight(i) * s;
        weight += g.node_time_weight(i) * static_cast<double>(P);
    }
    abs_mean /= weight;
    ScalarField phi(g);
    if (abs_mean == 0.0) return phi;
    const double defect = std::abs(mean) / abs_mean;
    if (defect > 1e-6) {
        std::ostringstream os;
        os << "poisson: incompatible right-hand side (relative defect " << defect << ")";
        throw IncompatibleRhsError(defect, os.str());
    }

    // B^T B phi = (w_t / dt) (f - mean) / r, with B the unweighted gradient.
    std::vector<double>& x = phi.values;
    for (int i = 0; i < nt; ++i) {
        const double c = g.node_time_weight(i) / dt / r;
        for (std::size_t n = 0; n < P; ++n) x[i * P + n] = c * (f.values[i * P + n] - mean);
    }

    fftw_plan fwd = impl_->forward;
    fftw_plan bwd = impl_->backward;
    parallel_for(static_cast<std::size_t>(nt), 4, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fftw_execute_r2r(fwd, x.data() + i * P, x.data() + i * P);
    });

    // Per mode: diag_i = c_i/dt^2 + lambda*a_i, off = -1/dt^2 + lambda/4,
    // c = (1,2,...,2,1), a = (1/4,1/2,...,1/2,1/4).
    const double idt2 = 1.0 / (dt * dt);
    const std::vector<double>& lambda = impl_->lambda;
    std::vector<double> cprime(static_cast<std::size_t>(nt) * P);
    parallel_for(P, 256, [&](std::size_t b, std::size_t e) {
        for (std::size_t m = b; m < e; ++m) {
            const double lam = lambda[m];
            const double off = -idt2 + 0.25 * lam;
            auto diag = [&](int i) {
                const bool end = i == 0 || i == nt - 1;
                double d = (end ? 1.0 : 2.0) * idt2 + (end ? 0.25 : 0.5) * lam;
                if (m == 0 && i == 0) d += idt2;
                return d;
            };
            double denom = diag(0);
            cprime[m] = off / denom;
            x[m] /= denom;
            for (int i = 1; i < nt; ++i) {
                const std::size_t id = static_cast<std::size_t>(i) * P + m;
                const std::size_t ip = id - P;
                denom = diag(i) - off * cprime[ip];
                cprime[id] = off / denom;
                x[id] = (x[id] - off * x[ip]) / denom;
            }
            for (int i = nt - 2; i >= 0; --i) {
                const std::size_t id = static_cast<std::size_t>(i) * P + m;
                x[id] -= cprime[id] * x[id + P];
            }
        }
    });

    const double nrm = impl_->norm;
    parallel_for(static_cast<std::size_t>(nt), 4, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            double* s = x.data() + i * P;
            fftw_execute_r2r(bwd, s, s);
            for (std::size_t n = 0; n < P; ++n) s[n] *= nrm;
        }
    });

    const double phi_mean = weighted_mean(phi);
    for (double& v : x) v -= phi_mean;
    return phi;
}

ScalarField boundary_source(const GridSpec& g, const SpaceField& rho0, const SpaceField& rho1) {
    if (!rho0.matches(g) || !rho1.matches(g)) throw GridError("boundary_source: density size mismatch");
    ScalarField out(g);
    const std::size_t P = g.plane();
    const double c = 2.0 / g.dt();
    for (std::size_t n = 0; n < P; ++n) {
        out.values[n] = c * rho0.values[n];
        out.values[(g.nt - 1) * P + n] = -c * rho1.values[n];
    }
    return out;
}

ScalarField PoissonSolver::solve_phi(const PoissonProblem& problem) const {
    const GridSpec& g = impl_->grid;
    require_same_grid(g, problem.rhs_source.grid, "solve_phi");
    for (double v : problem.rho0.values)
        if (v < 0.0) throw std::invalid_argument("solve_phi: rho0 must be nonnegative");
    for (double v : problem.rho1.values)
        if (v < 0.0) throw std::invalid_argument("solve_phi: rho1 must be nonnegative");
    ScalarField f = div_ts(problem.rhs_source);
    ScalarField src = boundary_source(g, problem.rho0, problem.rho1);
    for (std::size_t n = 0; n < f.values.size(); ++n) f.values[n] -= src.values[n];
    return solve(f, problem.r);
}

ScalarField solve_phi(const PoissonProblem& problem) {
    PoissonSolver solver(problem.rhs_source.grid);
    return solver.solve_phi(problem);
}

}  // namespace cmot
