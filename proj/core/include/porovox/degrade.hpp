#pragma once

#include <cstdint>
#include <vector>

#include "porovox/volume.hpp"

namespace porovox {

/// Parallel-beam sinogram of one square slice; rows indexed by angle,
/// detector spacing equals voxel spacing.
struct Sinogram {
    std::vector<double> angles; // radians
    int detector_bins = 0;
    std::vector<double> values; // angles x detector_bins, row-major

    double at(std::size_t angle, int bin) const { return values[angle * detector_bins + bin]; }
    double& at(std::size_t angle, int bin) { return values[angle * detector_bins + bin]; }
};

struct DegradeSpec {
    double exposure_fraction = 1.0;   // (0, 1]
    double projection_fraction = 1.0; // (0, 1]
    int base_angles = 720;            // over 180 degrees
    double incident_intensity = 1e5;  // I0 counts per detector bin
    bool noise_enabled = true;
    std::uint64_t seed = 0;
};

/// Uniformly spaced angles over [0, pi): ceil(fraction * base) of them.
std::vector<double> subsampled_angles(int base_angles, double fraction);

/// Ray-driven line integrals with bilinear sampling; slice must be square.
Sinogram radon2d(const std::vector<float>& slice, int n, const std::vector<double>& angles);

/// Ram-Lak filtered backprojection (frequency-domain filter per projection);
/// output zeroed outside the reconstruction circle.
std::vector<float> fbp2d(const Sinogram& s, int n);

/// Apply Poisson transmission noise at the given exposure fraction to a
/// sinogram in place: counts ~ Poisson(e * I0 * exp(-p)), clamped at 1
/// count, then converted back to line integrals.
void apply_transmission_noise(Sinogram& s, double exposure_fraction, double incident_intensity,
                              std::uint64_t seed);

/// Slice-wise resimulation: radon at the subsampled angles, transmission
/// noise, FBP. Per-slice RNG stream seeded with seed ^ z so results do not
/// depend on slice scheduling.
Volume degrade_volume(const Volume& v, const DegradeSpec& spec);

} // namespace porovox
