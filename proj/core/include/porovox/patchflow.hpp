#pragma once

#include <cstdint>
#include <vector>

#include "porovox/volume.hpp"

namespace porovox {

/// Plan of overlapping cubic patch placements on a replicate-padded lattice.
struct PatchGrid {
    std::array<int, 3> dims{0, 0, 0};        // original volume dims
    std::array<int, 3> padded_dims{0, 0, 0}; // padding appended at the high end
    int patch_size = 64;
    int stride = 32;
    std::vector<std::array<int, 3>> placements; // patch origins in padded coords

    std::size_t patch_count() const { return placements.size(); }
};

PatchGrid plan_patches(std::array<int, 3> dims, int patch_size = 64, int stride = -1);

/// Window copy from the (implicitly) replicate-padded volume.
Volume extract_patch(const Volume& v, const PatchGrid& grid, std::size_t index);

/// Streaming mean aggregation of per-placement patches back into a volume.
/// Every placement must be added exactly once; coverage weights sum to 1 at
/// each voxel by construction.
class PatchAggregator {
public:
    explicit PatchAggregator(const PatchGrid& grid);
    void add(std::size_t index, const Volume& patch);
    Volume finalize() const; // cropped to grid.dims

private:
    PatchGrid grid_;
    std::vector<double> sum_;
    std::vector<std::uint32_t> count_;
    std::vector<std::uint8_t> added_;
};

Volume aggregate(const std::vector<Volume>& patches, const PatchGrid& grid);

struct AugmentSpec {
    std::array<double, 3> flip_prob{0.0, 0.0, 0.0};
    bool elastic_enabled = false;
    int elastic_grid_spacing = 16; // voxels between control points
    double elastic_max_displacement = 4.0;
    std::uint64_t seed = 0;
};

/// Applies the same seeded geometric transform (random axis flips, coarse
/// elastic warp) to an image patch and its label patch. Image samples are
/// interpolated trilinearly, labels by nearest neighbour.
std::pair<Volume, Mask> augment(const Volume& image, const Mask& label,
                                const AugmentSpec& spec);

} // namespace porovox
