#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "porovox/labeler.hpp"
#include "porovox/patchflow.hpp"
#include "porovox/volume.hpp"

namespace porovox {

/// Voxel-wise anomaly scoring over a patch: returns a non-negative score
/// patch and the reconstruction it derives from, on the input grid.
class AnomalyScorer {
public:
    virtual ~AnomalyScorer() = default;
    virtual void score(const Volume& patch, Volume& score_out, Volume& recon_out) const = 0;
};

struct ScoreVolume {
    Volume score;          // anomaly score A, >= 0
    Volume reconstruction; // predicted volume
};

struct PcaScorerSpec {
    int patch_edge = 8;  // sub-patch edge used for fitting and scoring
    int components = 16; // retained principal directions
    int stride = 4;      // internal scoring stride
    int samples_per_volume = 512;
};

/// Reference unsupervised scorer: PCA over vectorized sub-patches; anomaly
/// score is the absolute residual against the subspace reconstruction.
class PcaScorer : public AnomalyScorer {
public:
    void score(const Volume& patch, Volume& score_out, Volume& recon_out) const override;

    int patch_edge() const { return edge_; }
    int components() const { return k_; }
    bool fitted() const { return fitted_; }
    /// Max abs deviation of basis'*basis from identity.
    double basis_orthonormality_error() const;

    /// Reconstruction of a single vectorized sub-patch (projection onto the
    /// fitted affine subspace).
    std::vector<float> reconstruct_subpatch(const std::vector<float>& x) const;

private:
    friend PcaScorer fit_pca_scorer(const std::vector<Volume>&, const std::vector<Mask>*,
                                    const PcaScorerSpec&, std::uint64_t);
    int edge_ = 8;
    int k_ = 16;
    int stride_ = 4;
    bool fitted_ = false;
    std::vector<float> mean_;        // edge^3
    std::vector<std::vector<float>> basis_; // k orthonormal vectors of length edge^3
};

/// Fit on sub-patches sampled from the given volumes (restricted to the
/// object masks when provided). Deterministic given the seed. If the data
/// rank is below the requested component count, k is reduced with a warning
/// on stderr.
PcaScorer fit_pca_scorer(const std::vector<Volume>& volumes,
                         const std::vector<Mask>* object_masks, const PcaScorerSpec& spec,
                         std::uint64_t seed);

/// Patch-wise scoring of a whole volume; score and reconstruction patches
/// are mean-aggregated over the overlap lattice.
ScoreVolume score_volume(const AnomalyScorer& scorer, const Volume& v, const PatchGrid& grid);

struct ImportedScores {
    ScoreVolume scores;
    std::size_t clamped_negative_count = 0;
};

ImportedScores import_scores(const std::string& score_path, const std::string& recon_path);

/// Binarize A >= threshold, then connectivity filter and small-pore removal.
PoreMask scores_to_labels(const ScoreVolume& sv, double threshold, int min_dims = 2);

} // namespace porovox
