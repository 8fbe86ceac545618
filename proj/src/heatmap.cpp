#include "cmot/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cmot {

std::vector<std::uint8_t> grey_levels(const double* slice, int nx, int ny, double vmax) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(nx) * ny, 0);
    if (!(vmax > 0.0)) return px;
    for (int row = 0; row < ny; ++row) {
        const int k = ny - 1 - row;
        for (int j = 0; j < nx; ++j) {
            const double v = std::max(0.0, slice[static_cast<std::size_t>(j) * ny + k]);
            const double level = std::min(255.0, std::round(255.0 * v / vmax));
            px[static_cast<std::size_t>(row) * nx + j] = static_cast<std::uint8_t>(level);
        }
    }
    return px;
}

void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels, int width, int height) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FrameIoError("cannot open '" + path.string() + "' for writing");
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!out) throw FrameIoError("write to '" + path.string() + "' failed");
}

std::vector<int> snapshot_indices(int nt, int n_snapshots) {
    if (n_snapshots < 2) throw std::invalid_argument("heatmaps: n_snapshots must be >= 2");
    std::vector<int> idx(n_snapshots);
    for (int k = 0; k < n_snapshots; ++k)
        idx[k] = static_cast<int>(std::lround(static_cast<double>(k) * (nt - 1) / (n_snapshots - 1)));
    return idx;
}

std::vector<std::filesystem::path> write_heatmaps(
    const FrameArchive& frames, const std::filesystem::path& dir, int n_snapshots,
    const std::vector<std::pair<std::string, SpaceField>>& auxiliary) {
    const FrameField* density = frames.find("density");
    if (!density) throw FrameIoError("heatmaps: archive has no density field");
    const GridSpec& g = frames.grid;
    const auto idx = snapshot_indices(static_cast<int>(density->time_count), n_snapshots);
    std::filesystem::create_directories(dir);
    const double vmax = density->values.empty()
                            ? 0.0
                            : *std::max_element(density->values.begin(), density->values.end());
    std::vector<std::filesystem::path> written;
    for (int k = 0; k < n_snapshots; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "density_%02d.pgm", k);
        const double* slice = density->values.data() + static_cast<std::size_t>(idx[k]) * g.plane();
        auto path = dir / name;
        write_pgm(path, grey_levels(slice, g.nx, g.ny, vmax), g.nx, g.ny);
        written.push_back(path);
    }
    for (const auto& [aux_name, field] : auxiliary) {
        const double m = field.values.empty() ? 0.0 : *std::max_element(field.values.begin(), field.values.end());
        auto path = dir / (aux_name + ".pgm");
        write_pgm(path, grey_levels(field.values.data(), field.nx, field.ny, m), field.nx, field.ny);
        written.push_back(path);
    }
    return written;
}

}  // namespace cmot
