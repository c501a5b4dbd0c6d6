#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "porovox/degrade.hpp"
#include "porovox/evalkit.hpp"
#include "porovox/scorer.hpp"

namespace porovox {

struct VolumeEntry {
    std::string image;  // volume header path
    std::string labels; // ground-truth mask header path (may be empty)
};

struct ExperimentConfig {
    std::vector<VolumeEntry> volumes;
    int folds = 5;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    int patch_size = 64;
    int stride = 32;
    PcaScorerSpec pca;
    std::uint64_t config_hash = 0; // FNV-1a over the canonical config dump
};

ExperimentConfig load_experiment_config(const std::string& path);
std::uint64_t fnv1a_hash(const std::string& bytes);

struct GridSpec {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> gammas;
};

GridSpec load_grid_spec(const std::string& path);

/// 4 uniform steps from 0.1 to 0.9.
std::vector<double> default_alpha_beta_values();
/// 8 uniform steps from 1/3 to 2.
std::vector<double> default_gamma_values();

/// Deterministic fold assignment: seeded shuffle, then round-robin; element i
/// of the result is the fold in which roster item i is the validation set.
std::vector<int> make_folds(std::size_t roster_size, int k, std::uint64_t seed);

struct GridCell {
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    std::vector<double> fold_values;
    FoldSummary summary;
    bool valid = true;
    std::string error;
};

struct CrossValReport {
    std::vector<GridCell> cells;
    int folds = 0;
    std::size_t best_index = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::size_t evaluation_count = 0; // cells x folds actually run
};

/// Metric per (FTL cell, fold); higher is better. A throwing metric marks
/// the cell invalid and the search continues.
using MetricFn = std::function<double(const FTLParams&, int fold)>;

CrossValReport run_grid_search(const GridSpec& grid, int folds, const MetricFn& metric,
                               std::uint64_t config_hash = 0, std::uint64_t seed = 0);

struct TwoPhaseResult {
    CrossValReport alpha_beta; // gamma fixed at 0.5
    CrossValReport gamma;      // alpha/beta fixed at phase-1 optimum
    FTLParams selected;
};

/// Phase 1 searches alpha/beta with gamma = 0.5; phase 2 sweeps gamma at the
/// selected alpha/beta.
TwoPhaseResult run_two_phase_search(const std::vector<double>& alpha_beta_values,
                                    const std::vector<double>& gamma_values, int folds,
                                    const MetricFn& metric, std::uint64_t config_hash = 0,
                                    std::uint64_t seed = 0);

/// Per-fold validation predictions for the built-in pipeline metric: fits the
/// PCA scorer on each fold's training volumes and scores its validation
/// volumes; scores are normalized to [0,1] per volume.
struct FoldPrediction {
    Volume prediction; // normalized score volume
    Mask target;
};
std::vector<std::vector<FoldPrediction>> prepare_fold_predictions(const ExperimentConfig& cfg);

/// Metric = 1 - FTL of the fold's (prediction, target) pairs, averaged.
MetricFn pipeline_metric(const std::vector<std::vector<FoldPrediction>>& per_fold);

struct SweepCell {
    double exposure = 1.0;
    double projections = 1.0;
    double auc = 0.0;
    double ap = 0.0;
    bool valid = true;
    std::string error;
};

/// Degrade -> score -> surface suppression -> AUC/AP for every
/// (exposure, projection) pair.
std::vector<SweepCell> run_degradation_sweep(const Volume& test, const Mask& ground_truth,
                                             const AnomalyScorer& scorer,
                                             const DegradeSpec& base,
                                             const std::vector<double>& exposures,
                                             const std::vector<double>& projections,
                                             int patch_size, int stride,
                                             const std::vector<double>& sigma_grid);

void emit_report(const CrossValReport& report, const std::string& dir,
                 const std::string& prefix = "grid");
void emit_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path);
void write_curves_csv(const EvalCurves& curves, const std::string& path);

} // namespace porovox
