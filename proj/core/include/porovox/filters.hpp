#pragma once

#include "porovox/volume.hpp"

namespace porovox {

/// Separable Gaussian, kernel truncated at radius ceil(3*sigma), normalized to
/// sum 1, replicate border. sigma = 0 returns the input unchanged.
Volume gaussian_blur3d(const Volume& v, double sigma);

/// Per-voxel |dx|+|dy|+|dz| with central differences (one-sided at borders),
/// derivatives in voxel units. Requires every axis length >= 2.
Volume gradient_l1(const Volume& v);

} // namespace porovox
