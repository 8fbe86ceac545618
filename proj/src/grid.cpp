#include "cmot/grid.hpp"

#include <cmath>
#include <limits>

namespace cmot {

GridSpec GridSpec::make(int nt, int nx, int ny, SpaceBc bc, double lx, double ly) {
    GridSpec g{nt, nx, ny, bc, lx, ly};
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (nt < 2 || nx < 2 || ny < 2) {
        throw GridError("grid requires nt, nx, ny >= 2 (got " + std::to_string(nt) + ", " +
                        std::to_string(nx) + ", " + std::to_string(ny) + ")");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw GridError("domain lengths must be positive and finite");
    }
    const double total = static_cast<double>(nt) * nx * ny * 3.0;
    if (total > static_cast<double>(std::numeric_limits<std::ptrdiff_t>::max() / 8)) {
        throw GridError("grid too large to index");
    }
}

double GridSpec::node_time_weight(int i) const {
    return (i == 0 || i == nt - 1) ? 0.5 * dt() : dt();
}

std::string to_string(SpaceBc bc) { return bc == SpaceBc::Periodic ? "periodic" : "neumann"; }

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) throw GridError(std::string(where) + ": grid mismatch");
}

namespace {

// Forward difference of one time slice along x, written into out.
// Neumann leaves the last column at zero.
void forward_dx(const GridSpec& g, const double* f, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double inv = 1.0 / g.dx();
    for (int j = 0; j < nx; ++j) {
        int jn = j + 1;
        if (jn == nx) {
            if (g.space_bc == SpaceBc::Neumann) {
                for (int k = 0; k < ny; ++k) out[j * ny + k] = 0.0;
                continue;
            }
            jn = 0;
        }
        for (int k = 0; k < ny; ++k) out[j * ny + k] = (f[jn * ny + k] - f[j * ny + k]) * inv;
    }
}

void forward_dy(const GridSpec& g, const double* f, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double inv = 1.0 / g.dy();
    const bool periodic = g.space_bc == SpaceBc::Periodic;
    for (int j = 0; j < nx; ++j) {
        const double* row = f + j * ny;
        double* o = out + j * ny;
        for (int k = 0; k + 1 < ny; ++k) o[k] = (row[k + 1] - row[k]) * inv;
        o[ny - 1] = periodic ? (row[0] - row[ny - 1]) * inv : 0.0;
    }
}

// Backward difference along x, the negative transpose of forward_dx:
// out[j] += scale * (c[j] - c[j-1]) / dx with out-of-domain values zero.
void backward_dx_add(const GridSpec& g, const double* c, double scale, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double f = scale / g.dx();
    const bool periodic = g.space_bc == SpaceBc::Periodic;
    for (int j = 0; j < nx; ++j) {
        const bool here = periodic || j < nx - 1;
        const int jp = j - 1;
        const bool prev = jp >= 0 || periodic;
        const int jpp = jp < 0 ? nx - 1 : jp;
        for (int k = 0; k < ny; ++k) {
            double v = here ? c[j * ny + k] : 0.0;
            if (prev) v -= c[jpp * ny + k];
            out[j * ny + k] += f * v;
        }
    }
}

void backward_dy_add(const GridSpec& g, const double* c, double scale, double* out) {
    const int nx = g.nx, ny = g.ny;
    const double f = scale / g.dy();
    const bool periodic = g.space_bc == SpaceBc::Periodic;
    for (int j = 0; j < nx; ++j) {
        const double* row = c + j * ny;
        double* o = out + j * ny;
        o[0] += f * ((periodic ? row[0] - row[ny - 1] : row[0]));
        for (int k = 1; k < ny - 1; ++k) o[k] += f * (row[k] - row[k - 1]);
        o[ny - 1] += f * ((periodic ? row[ny - 1] : 0.0) - row[ny - 2]);
    }
}

}  // namespace

PairField grad_ts(const ScalarField& phi) {
    const GridSpec& g = phi.grid;
    PairField out(g);
    const std::size_t P = g.plane();
    const double inv_dt = 1.0 / g.dt();
    std::vector<double> dx_lo(P), dx_hi(P), dy_lo(P), dy_hi(P);
    auto a = out.scalar();
    auto bx = out.vector(0);
    auto by = out.vector(1);
    forward_dx(g, phi.values.data(), dx_lo.data());
    forward_dy(g, phi.values.data(), dy_lo.data());
    for (int i = 0; i < g.slots(); ++i) {
        const double* f0 = phi.values.data() + i * P;
        const double* f1 = f0 + P;
        forward_dx(g, f1, dx_hi.data());
        forward_dy(g, f1, dy_hi.data());
        const std::size_t off = i * P;
        for (std::size_t n = 0; n < P; ++n) {
            a[off + n] = (f1[n] - f0[n]) * inv_dt;
            bx[off + n] = 0.5 * (dx_lo[n] + dx_hi[n]);
            by[off + n] = 0.5 * (dy_lo[n] + dy_hi[n]);
        }
        dx_lo.swap(dx_hi);
        dy_lo.swap(dy_hi);
    }
    return out;
}

ScalarField div_ts(const PairField& u) {
    const GridSpec& g = u.grid;
    ScalarField out(g);
    const std::size_t P = g.plane();
    const double dt = g.dt();
    auto a = u.scalar();
    auto bx = u.vector(0);
    auto by = u.vector(1);
    std::vector<double> avg_x(P), avg_y(P), acc(P);
    for (int i = 0; i < g.nt; ++i) {
        const bool lo = i > 0;
        const bool hi = i < g.slots();
        const std::size_t slo = (i - 1) * P;
        const std::size_t shi = i * P;
        for (std::size_t n = 0; n < P; ++n) {
            double ax = 0.0, ay = 0.0, at = 0.0;
            if (lo) {
                ax += bx[slo + n];
                ay += by[slo + n];
                at -= a[slo + n];
            }
            if (hi) {
                ax += bx[shi + n];
                ay += by[shi + n];
                at += a[shi + n];
            }
            avg_x[n] = 0.5 * ax;
            avg_y[n] = 0.5 * ay;
            acc[n] = at / dt;
        }
        backward_dx_add(g, avg_x.data(), 1.0, acc.data());
        backward_dy_add(g, avg_y.data(), 1.0, acc.data());
        const double scale = dt / g.node_time_weight(i);
        double* o = out.values.data() + i * P;
        for (std::size_t n = 0; n < P; ++n) o[n] = scale * acc[n];
    }
    return out;
}

ScalarField laplacian_ts(const ScalarField& phi) { return div_ts(grad_ts(phi)); }

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid, g.grid, "inner");
    const GridSpec& G = f.grid;
    const std::size_t P = G.plane();
    double total = 0.0;
    for (int i = 0; i < G.nt; ++i) {
        double s = 0.0;
        const std::size_t off = i * P;
        for (std::size_t n = 0; n < P; ++n) s += f.values[off + n] * g.values[off + n];
        total += G.node_weight(i) * s;
    }
    return total;
}

double inner(const PairField& f, const PairField& g) {
    require_same_grid(f.grid, g.grid, "inner");
    double s = 0.0;
    for (std::size_t n = 0; n < f.data.size(); ++n) s += f.data[n] * g.data[n];
    return f.grid.slot_weight() * s;
}

double norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }
double norm(const PairField& f) { return std::sqrt(inner(f, f)); }

double scalar_part_norm(const PairField& f) {
    double s = 0.0;
    for (double v : f.scalar()) s += v * v;
    return std::sqrt(f.grid.slot_weight() * s);
}

double space_integral(const SpaceField& f, const GridSpec& g) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * g.cell_area();
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void axpby(PairField& out, double a, const PairField& x, double b, const PairField& y) {
    require_same_grid(x.grid, y.grid, "axpby");
    if (out.data.size() != x.data.size()) out = PairField(x.grid);
    for (std::size_t n = 0; n < x.data.size(); ++n) out.data[n] = a * x.data[n] + b * y.data[n];
}

}  // namespace cmot
