#pragma once

#include <vector>

#include "porovox/volume.hpp"

namespace porovox {

struct PoreComponent {
    std::vector<std::array<int, 3>> voxels; // sorted, lexicographic (x,y,z)
    std::array<int, 3> bbox_min{0, 0, 0};
    std::array<int, 3> bbox_max{0, 0, 0};
    std::size_t voxel_count = 0;

    int extent(int axis) const { return bbox_max[axis] - bbox_min[axis] + 1; }
    std::array<double, 3> centroid() const;
};

struct PoreMask {
    Mask mask;
    std::vector<PoreComponent> components;
};

/// Threshold maximizing between-class variance over the histogram's bin
/// edges; ties resolved to the smallest edge. Needs >= 2 non-empty bins.
double otsu_threshold(const Histogram& h);

/// Otsu cut (256 bins over [min,max]) and complement-of-background flood
/// fill. Internal cavities stay inside the mask.
Mask object_mask(const Volume& v);

/// Second Otsu restricted to voxels inside `obj` (256 bins over the masked
/// range), capped at the whole-volume Otsu cut so partial-volume surface
/// voxels are never marked; true where v < threshold and inside the object.
Mask pore_mask_raw(const Volume& v, const Mask& obj);

/// Maximal 6-connected components, ordered by lexicographic minimum voxel.
std::vector<PoreComponent> connected_components(const Mask& mask);

/// Keep components whose bounding box spans >= min_dims voxels on every axis.
std::vector<PoreComponent> filter_small_pores(std::vector<PoreComponent> comps,
                                              int min_dims = 2);

Mask components_to_mask(const std::vector<PoreComponent>& comps, std::array<int, 3> dims,
                        std::array<double, 3> spacing = {10.0, 10.0, 10.0});

/// Full heuristic labeling chain: object mask, pore mask, connectivity
/// filter, small-pore removal.
PoreMask extract_pore_labels(const Volume& v, int min_dims = 2);

} // namespace porovox
