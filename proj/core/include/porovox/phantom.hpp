#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "porovox/volume.hpp"

namespace porovox {

struct PhantomPore {
    std::array<double, 3> center; // voxel coordinates
    std::array<double, 3> radii;  // ellipsoid semi-axes, voxels
};

enum class PhantomShape { Cylinder, Cube };

/// Synthetic sample: solid cylinder (z axis) or cube inside a background
/// field, with ellipsoidal pores rasterized at background intensity.
/// Blur acts as a partial-volume surrogate; Gaussian noise is seeded.
struct PhantomSpec {
    PhantomShape shape = PhantomShape::Cylinder;
    std::array<int, 3> dims{64, 64, 64};
    std::vector<PhantomPore> pores;
    float background = 0.0f;
    float material = 100.0f;
    double blur_sigma = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Deterministic given the spec. The returned mask marks exactly the
/// rasterized pore ellipsoids before blur/noise. Rejects pores that are not
/// strictly inside the solid.
std::pair<Volume, Mask> generate_phantom(const PhantomSpec& spec);

/// True if the voxel center (x,y,z) lies inside the solid body of the spec.
bool phantom_solid_contains(const PhantomSpec& spec, int x, int y, int z);

/// Convenience: scatter `n_pores` random ellipsoidal pores (semi-axes in
/// [r_min, r_max]) strictly inside the solid, seeded.
std::vector<PhantomPore> random_pores(const PhantomSpec& spec, int n_pores, double r_min,
                                      double r_max, std::uint64_t seed);

} // namespace porovox
