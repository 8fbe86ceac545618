#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cmot/frames.hpp"

namespace cmot {

// Grey levels of one nx*ny slice: round(255 * max(v,0) / vmax), clamped to
// [0,255]. Rows run from y = ly at the top to y = 0 at the bottom; columns
// follow x. A non-positive vmax gives a black image.
std::vector<std::uint8_t> grey_levels(const double* slice, int nx, int ny, double vmax);

void write_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels, int width, int height);

// Time-node indices of n evenly spaced snapshots among nt frames.
std::vector<int> snapshot_indices(int nt, int n_snapshots);

// Writes density_00.pgm ... for the density frames, normalised to the
// global maximum over all frames, and <name>.pgm for every auxiliary field
// normalised to its own maximum. Returns the written paths.
std::vector<std::filesystem::path> write_heatmaps(
    const FrameArchive& frames, const std::filesystem::path& dir, int n_snapshots,
    const std::vector<std::pair<std::string, SpaceField>>& auxiliary = {});

}  // namespace cmot
