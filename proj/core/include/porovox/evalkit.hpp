#pragma once

#include <vector>

#include "porovox/volume.hpp"

namespace porovox {

struct FTLParams {
    double alpha = 0.7;
    double beta = 0.3;
    double gamma = 0.75;
    double smooth = 1e-6;
};

struct SoftCounts {
    double tp = 0.0, fn = 0.0, fp = 0.0;
};

struct RocPoint {
    double fpr, tpr, threshold;
};
struct PrPoint {
    double recall, precision, threshold;
};

struct EvalCurves {
    std::vector<RocPoint> roc;
    std::vector<PrPoint> pr;
    double auc = 0.0;
    double ap = 0.0;
};

/// TP = sum p*t, FN = sum (1-p)*t, FP = sum p*(1-t); pred must lie in [0,1].
SoftCounts soft_counts(const Volume& pred, const Mask& target);

double focal_tversky_loss(const SoftCounts& c, const FTLParams& p);
double focal_tversky_loss(const Volume& pred, const Mask& target, const FTLParams& p);

/// 2TP/(2TP+FN+FP) over binary masks; empty vs empty is 1.
double dice_score(const Mask& pred, const Mask& target);

/// Weighted mean with geometric weights 1, 1/2, 1/4, ...
double deep_supervision_combine(const std::vector<double>& stage_losses);

EvalCurves roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);
EvalCurves pr_ap(const std::vector<double>& scores, const std::vector<int>& labels);

/// Both curve families plus AUC and AP in one pass.
EvalCurves evaluate_curves(const std::vector<double>& scores, const std::vector<int>& labels);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Welch's two-sample t statistic, Satterthwaite degrees of freedom,
/// two-sided p-value.
WelchResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b);

struct FoldSummary {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

FoldSummary summarize_folds(const std::vector<double>& values);

/// Flattens a score volume + ground-truth mask into score/label arrays,
/// optionally restricted to a domain mask and uniformly subsampled (seeded)
/// when the voxel budget is exceeded.
void flatten_for_eval(const Volume& scores, const Mask& labels, const Mask* domain,
                      std::vector<double>& out_scores, std::vector<int>& out_labels,
                      std::size_t max_voxels = 100000000, std::uint64_t seed = 0);

} // namespace porovox
