#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmot {

enum class SpaceBc { Periodic, Neumann };

class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Space-time grid over [0,1] x [0,lx] x [0,ly].
// Potentials live on nt time nodes t_i = i*dt. Density and momentum live on
// the nt-1 time slots centred at (i+1/2)*dt. Space is cell-centred with
// nx*ny cells for both boundary conditions, so dx = lx/nx.
struct GridSpec {
    int nt = 2;
    int nx = 2;
    int ny = 2;
    SpaceBc space_bc = SpaceBc::Periodic;
    double lx = 1.0;
    double ly = 1.0;

    static GridSpec make(int nt, int nx, int ny, SpaceBc bc, double lx = 1.0, double ly = 1.0);

    void validate() const;

    double dt() const { return 1.0 / (nt - 1); }
    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double cell_area() const { return dx() * dy(); }
    int slots() const { return nt - 1; }
    std::size_t plane() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t node_count() const { return static_cast<std::size_t>(nt) * plane(); }
    std::size_t slot_count() const { return static_cast<std::size_t>(slots()) * plane(); }

    // Trapezoid weight of time node i (dt/2 at both ends).
    double node_time_weight(int i) const;
    double node_weight(int i) const { return node_time_weight(i) * cell_area(); }
    double slot_weight() const { return dt() * cell_area(); }

    bool operator==(const GridSpec&) const = default;
};

std::string to_string(SpaceBc bc);

// Field on the nx*ny spatial cells, x-major: index = j*ny + k.
struct SpaceField {
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    SpaceField() = default;
    SpaceField(int nx_, int ny_, double fill = 0.0)
        : nx(nx_), ny(ny_), values(static_cast<std::size_t>(nx_) * ny_, fill) {}
    explicit SpaceField(const GridSpec& g, double fill = 0.0) : SpaceField(g.nx, g.ny, fill) {}

    double& operator()(int j, int k) { return values[static_cast<std::size_t>(j) * ny + k]; }
    double operator()(int j, int k) const { return values[static_cast<std::size_t>(j) * ny + k]; }
    std::size_t size() const { return values.size(); }
    bool matches(const GridSpec& g) const { return nx == g.nx && ny == g.ny; }
};

struct SpaceMask {
    int nx = 0;
    int ny = 0;
    std::vector<unsigned char> inside;

    SpaceMask() = default;
    SpaceMask(int nx_, int ny_) : nx(nx_), ny(ny_), inside(static_cast<std::size_t>(nx_) * ny_, 0) {}

    bool operator()(int j, int k) const { return inside[static_cast<std::size_t>(j) * ny + k] != 0; }
    std::size_t size() const { return inside.size(); }
    bool matches(const GridSpec& g) const { return nx == g.nx && ny == g.ny; }
};

// Scalar on time nodes, index = (i*nx + j)*ny + k.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.node_count(), fill) {}

    double& operator()(int i, int j, int k) { return values[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return values[index(i, j, k)]; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * grid.nx + j) * grid.ny + k;
    }
    std::span<double> slice(int i) { return {values.data() + i * grid.plane(), grid.plane()}; }
    std::span<const double> slice(int i) const { return {values.data() + i * grid.plane(), grid.plane()}; }
};

// (scalar, 2-vector) field on time slots. Components are stored contiguously:
// component c, slot i, cell (j,k) at c*slot_count + (i*nx + j)*ny + k.
// Under Neumann the x-component at j = nx-1 and the y-component at k = ny-1
// sit outside the domain; grad_ts writes zero there and div_ts ignores them.
struct PairField {
    GridSpec grid;
    std::vector<double> data;

    PairField() = default;
    explicit PairField(const GridSpec& g) : grid(g), data(3 * g.slot_count(), 0.0) {}

    std::size_t component_size() const { return grid.slot_count(); }
    std::span<double> component(int c) { return {data.data() + c * component_size(), component_size()}; }
    std::span<const double> component(int c) const {
        return {data.data() + c * component_size(), component_size()};
    }
    std::span<double> scalar() { return component(0); }
    std::span<const double> scalar() const { return component(0); }
    std::span<double> vector(int d) { return component(1 + d); }
    std::span<const double> vector(int d) const { return component(1 + d); }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * grid.nx + j) * grid.ny + k;
    }
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

PairField grad_ts(const ScalarField& phi);
ScalarField div_ts(const PairField& u);
ScalarField laplacian_ts(const ScalarField& phi);

double inner(const ScalarField& f, const ScalarField& g);
double inner(const PairField& f, const PairField& g);
double norm(const ScalarField& f);
double norm(const PairField& f);

// Slot-weighted norm of the scalar component only.
double scalar_part_norm(const PairField& f);
double space_integral(const SpaceField& f, const GridSpec& g);

bool all_finite(std::span<const double> v);

// out = a*x + b*y, elementwise over PairField storage.
void axpby(PairField& out, double a, const PairField& x, double b, const PairField& y);

}  // namespace cmot
