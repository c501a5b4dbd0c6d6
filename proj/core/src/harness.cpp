#include "porovox/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "porovox/labeler.hpp"
#include "porovox/postproc.hpp"
#include "porovox/volume_io.hpp"

namespace porovox {

using nlohmann::json;

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;

    ExperimentConfig cfg;
    for (const auto& v : j.at("volumes")) {
        VolumeEntry e;
        e.image = v.at("image").get<std::string>();
        if (v.contains("labels")) e.labels = v.at("labels").get<std::string>();
        cfg.volumes.push_back(std::move(e));
    }
    cfg.folds = j.value("folds", 5);
    cfg.seed = j.value("seed", 0ull);
    cfg.output_dir = j.value("output_dir", ".");
    cfg.patch_size = j.value("patch_size", 64);
    cfg.stride = j.value("stride", cfg.patch_size / 2);
    if (j.contains("pca")) {
        const auto& p = j["pca"];
        cfg.pca.patch_edge = p.value("patch_edge", 8);
        cfg.pca.components = p.value("components", 16);
        cfg.pca.stride = p.value("stride", 4);
        cfg.pca.samples_per_volume = p.value("samples_per_volume", 512);
    }
    if (cfg.folds < 2) throw std::runtime_error("config: folds must be >= 2");
    // nlohmann::json dumps objects with sorted keys, so equivalent configs
    // hash identically regardless of key order in the file.
    cfg.config_hash = fnv1a_hash(j.dump());
    return cfg;
}

GridSpec load_grid_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid spec: " + path);
    json j;
    in >> j;
    GridSpec g;
    g.alphas = j.value("alphas", default_alpha_beta_values());
    g.betas = j.value("betas", default_alpha_beta_values());
    g.gammas = j.value("gammas", std::vector<double>{0.5});
    if (g.alphas.empty() || g.betas.empty() || g.gammas.empty())
        throw std::runtime_error("grid spec: empty axis");
    return g;
}

std::vector<double> default_alpha_beta_values() {
    std::vector<double> v(4);
    for (int i = 0; i < 4; ++i) v[i] = 0.1 + (0.9 - 0.1) * i / 3.0;
    return v;
}

std::vector<double> default_gamma_values() {
    std::vector<double> v(8);
    for (int i = 0; i < 8; ++i) v[i] = 1.0 / 3.0 + (2.0 - 1.0 / 3.0) * i / 7.0;
    return v;
}

std::vector<int> make_folds(std::size_t roster_size, int k, std::uint64_t seed) {
    if (static_cast<int>(roster_size) < k)
        throw std::invalid_argument("make_folds: roster smaller than fold count");
    std::vector<std::size_t> order(roster_size);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold(roster_size, 0);
    for (std::size_t i = 0; i < roster_size; ++i)
        fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    return fold;
}

namespace {

void select_best(CrossValReport& r) {
    bool have = false;
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        const auto& c = r.cells[i];
        if (!c.valid) continue;
        if (!have) {
            r.best_index = i;
            have = true;
            continue;
        }
        const auto& b = r.cells[r.best_index];
        const auto key = std::array{c.alpha, c.beta, c.gamma};
        const auto bkey = std::array{b.alpha, b.beta, b.gamma};
        if (c.summary.mean > b.summary.mean ||
            (c.summary.mean == b.summary.mean && key < bkey))
            r.best_index = i;
    }
    if (!have) throw std::runtime_error("grid search: every cell failed");
}

} // namespace

CrossValReport run_grid_search(const GridSpec& grid, int folds, const MetricFn& metric,
                               std::uint64_t config_hash, std::uint64_t seed) {
    CrossValReport r;
    r.folds = folds;
    r.config_hash = config_hash;
    r.seed = seed;
    for (double gamma : grid.gammas)
        for (double alpha : grid.alphas)
            for (double beta : grid.betas) {
                GridCell cell;
                cell.alpha = alpha;
                cell.beta = beta;
                cell.gamma = gamma;
                try {
                    for (int f = 0; f < folds; ++f) {
                        cell.fold_values.push_back(metric({alpha, beta, gamma}, f));
                        ++r.evaluation_count;
                    }
                    cell.summary = summarize_folds(cell.fold_values);
                } catch (const std::exception& e) {
                    cell.valid = false;
                    cell.error = e.what();
                }
                r.cells.push_back(std::move(cell));
            }
    select_best(r);
    return r;
}

TwoPhaseResult run_two_phase_search(const std::vector<double>& alpha_beta_values,
                                    const std::vector<double>& gamma_values, int folds,
                                    const MetricFn& metric, std::uint64_t config_hash,
                                    std::uint64_t seed) {
    TwoPhaseResult out;
    GridSpec phase1{alpha_beta_values, alpha_beta_values, {0.5}};
    out.alpha_beta = run_grid_search(phase1, folds, metric, config_hash, seed);
    const auto& best_ab = out.alpha_beta.cells[out.alpha_beta.best_index];

    GridSpec phase2{{best_ab.alpha}, {best_ab.beta}, gamma_values};
    out.gamma = run_grid_search(phase2, folds, metric, config_hash, seed);
    const auto& best = out.gamma.cells[out.gamma.best_index];
    out.selected = {best.alpha, best.beta, best.gamma};
    return out;
}

std::vector<std::vector<FoldPrediction>> prepare_fold_predictions(const ExperimentConfig& cfg) {
    const auto fold_of = make_folds(cfg.volumes.size(), cfg.folds, cfg.seed);

    std::vector<Volume> images;
    std::vector<Mask> labels;
    for (const auto& e : cfg.volumes) {
        images.push_back(load_volume(e.image));
        if (e.labels.empty())
            throw std::runtime_error("prepare_fold_predictions: volume without labels: " +
                                     e.image);
        labels.push_back(load_mask(e.labels));
    }

    std::vector<std::vector<FoldPrediction>> per_fold(cfg.folds);
    for (int f = 0; f < cfg.folds; ++f) {
        std::vector<Volume> train;
        for (std::size_t i = 0; i < images.size(); ++i)
            if (fold_of[i] != f) train.push_back(images[i]);
        const PcaScorer scorer = fit_pca_scorer(train, nullptr, cfg.pca, cfg.seed + f);

        for (std::size_t i = 0; i < images.size(); ++i) {
            if (fold_of[i] != f) continue;
            const auto grid = plan_patches(images[i].dims, cfg.patch_size, cfg.stride);
            ScoreVolume sv = score_volume(scorer, images[i], grid);
            float mx = 0.0f;
            for (float x : sv.score.data) mx = std::max(mx, x);
            if (mx > 0.0f)
                for (float& x : sv.score.data) x /= mx;
            per_fold[f].push_back({std::move(sv.score), labels[i]});
        }
    }
    return per_fold;
}

MetricFn pipeline_metric(const std::vector<std::vector<FoldPrediction>>& per_fold) {
    return [&per_fold](const FTLParams& params, int fold) {
        const auto& preds = per_fold.at(fold);
        if (preds.empty()) throw std::runtime_error("pipeline_metric: empty fold");
        double acc = 0.0;
        for (const auto& p : preds)
            acc += 1.0 - focal_tversky_loss(p.prediction, p.target, params);
        return acc / static_cast<double>(preds.size());
    };
}

std::vector<SweepCell> run_degradation_sweep(const Volume& test, const Mask& ground_truth,
                                             const AnomalyScorer& scorer,
                                             const DegradeSpec& base,
                                             const std::vector<double>& exposures,
                                             const std::vector<double>& projections,
                                             int patch_size, int stride,
                                             const std::vector<double>& sigma_grid) {
    std::vector<SweepCell> out;
    for (double e : exposures)
        for (double f : projections) {
            SweepCell cell;
            cell.exposure = e;
            cell.projections = f;
            try {
                DegradeSpec spec = base;
                spec.exposure_fraction = e;
                spec.projection_fraction = f;
                const Volume deg = degrade_volume(test, spec);
                const auto grid = plan_patches(deg.dims, patch_size, stride);
                ScoreVolume sv = score_volume(scorer, deg, grid);
                Volume a = sv.score;
                if (!sigma_grid.empty()) {
                    const PostprocParams p = optimize_params(sv, sigma_grid);
                    a = suppress_surface(sv, p);
                }
                std::vector<double> scores;
                std::vector<int> labels;
                flatten_for_eval(a, ground_truth, nullptr, scores, labels);
                const EvalCurves curves = evaluate_curves(scores, labels);
                cell.auc = curves.auc;
                cell.ap = curves.ap;
            } catch (const std::exception& ex) {
                cell.valid = false;
                cell.error = ex.what();
            }
            out.push_back(std::move(cell));
        }
    return out;
}

namespace {

json cell_to_json(const GridCell& c) {
    json j;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["valid"] = c.valid;
    if (c.valid) {
        j["fold_values"] = c.fold_values;
        j["mean"] = c.summary.mean;
        j["stderr"] = c.summary.stderr_of_mean;
    } else {
        j["error"] = c.error;
    }
    return j;
}

} // namespace

void emit_report(const CrossValReport& report, const std::string& dir,
                 const std::string& prefix) {
    std::filesystem::create_directories(dir);

    json summary;
    summary["seed"] = report.seed;
    summary["config_hash"] = report.config_hash;
    summary["folds"] = report.folds;
    summary["evaluation_count"] = report.evaluation_count;
    summary["best"] = cell_to_json(report.cells[report.best_index]);
    summary["cells"] = json::array();
    for (const auto& c : report.cells) summary["cells"].push_back(cell_to_json(c));

    const auto base = std::filesystem::path(dir);
    {
        std::ofstream out(base / (prefix + "_summary.json"));
        if (!out) throw std::runtime_error("emit_report: cannot write summary");
        out << summary.dump(2) << "\n";
    }
    {
        std::ofstream out(base / (prefix + "_table.csv"));
        if (!out) throw std::runtime_error("emit_report: cannot write table");
        out << "alpha,beta,gamma,mean,stderr,valid\n";
        out.precision(17);
        for (const auto& c : report.cells) {
            out << c.alpha << ',' << c.beta << ',' << c.gamma << ',';
            if (c.valid)
                out << c.summary.mean << ',' << c.summary.stderr_of_mean << ",1\n";
            else
                out << ",,0\n";
        }
    }
}

void emit_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_sweep_csv: cannot write " + path);
    out << "exposure,projections,auc,ap,valid\n";
    out.precision(17);
    for (const auto& c : cells) {
        out << c.exposure << ',' << c.projections << ',';
        if (c.valid)
            out << c.auc << ',' << c.ap << ",1\n";
        else
            out << ",,0\n";
    }
}

void write_curves_csv(const EvalCurves& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_curves_csv: cannot write " + path);
    out << "kind,x,y,threshold\n";
    out.precision(17);
    for (const auto& p : curves.roc)
        out << "roc," << p.fpr << ',' << p.tpr << ',' << p.threshold << "\n";
    for (const auto& p : curves.pr)
        out << "pr," << p.recall << ',' << p.precision << ',' << p.threshold << "\n";
}

} // namespace porovox
