#pragma once

#include <optional>
#include <vector>

#include "porovox/scorer.hpp"
#include "porovox/volume.hpp"

namespace porovox {

struct PostprocParams {
    double lambda = 0.0;
    double sigma = 0.0; // voxels
};

/// max(0, A - lambda * blur_sigma(|grad V_hat|_1)) per voxel.
Volume suppress_surface(const ScoreVolume& sv, const PostprocParams& p);

/// Exact minimizer of mean |A_i - lambda * B_i|: the weighted median of
/// A_i/B_i over voxels with B_i > 0, weighted by B_i. Optional mask
/// restricts the domain.
double optimal_lambda(const Volume& a, const Volume& b, const Mask* domain = nullptr);

/// Default sigma grid: n log-spaced values in [lo, hi].
std::vector<double> log_spaced_sigmas(double lo = 0.5, double hi = 8.0, int n = 8);

/// Grid search over sigma with the exact lambda solve per sigma; picks the
/// smallest-sigma argmin of the mean-L1 objective.
PostprocParams optimize_params(const ScoreVolume& sv,
                               const std::vector<double>& sigma_grid,
                               const Mask* domain = nullptr);

/// Mean |A - lambda*B| over the domain; exposed for reporting.
double postproc_objective(const Volume& a, const Volume& b, double lambda,
                          const Mask* domain = nullptr);

} // namespace porovox
