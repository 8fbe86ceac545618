#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmot/solver.hpp"

namespace cmot {

class FrameIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FrameField {
    std::string name;
    // Number of time samples; values hold time_count * nx * ny doubles.
    std::uint32_t time_count = 0;
    std::vector<double> values;
};

// Binary layout (little-endian throughout):
//   char[8]  magic "CMOTFRM1"
//   u32      format version (1)
//   u32      nt, nx, ny
//   u32      space boundary (0 periodic, 1 neumann)
//   f64      lx, ly, dt, dx, dy
//   u32      iterations
//   f64      energy
//   u32      field count
//   per field: u32 name length, name bytes, u32 time_count,
//              f64[time_count*nx*ny] values, index (t*nx + x)*ny + y
struct FrameArchive {
    GridSpec grid;
    std::uint32_t iterations = 0;
    double energy = 0.0;
    std::vector<FrameField> fields;

    const FrameField* find(const std::string& name) const;
};

inline constexpr std::uint32_t kFrameFormatVersion = 1;

// Fields: density (nt node frames), momentum_x and momentum_y (nt-1 slots),
// phi (nt nodes).
FrameArchive make_frame_archive(const Solution& solution, const TransportProblem& problem);

void write_frames(const FrameArchive& archive, const std::filesystem::path& path);
void write_frames(const Solution& solution, const TransportProblem& problem, const std::filesystem::path& path);
FrameArchive read_frames(const std::filesystem::path& path);

}  // namespace cmot
