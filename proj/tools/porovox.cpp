// porovox: volumetric porosity analysis CLI.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "porovox/degrade.hpp"
#include "porovox/evalkit.hpp"
#include "porovox/filters.hpp"
#include "porovox/harness.hpp"
#include "porovox/labeler.hpp"
#include "porovox/patchflow.hpp"
#include "porovox/phantom.hpp"
#include "porovox/postproc.hpp"
#include "porovox/scorer.hpp"
#include "porovox/volume_io.hpp"

using namespace porovox;
using nlohmann::json;

namespace {

std::array<int, 3> parse_dims(const std::string& s) {
    std::array<int, 3> d{};
    char comma;
    std::istringstream in(s);
    if (!(in >> d[0] >> comma >> d[1] >> comma >> d[2]))
        throw CLI::ValidationError("dims", "expected x,y,z");
    return d;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// "0.5:8:8log" -> 8 log-spaced values in [0.5, 8]; "a:b:n" linear; or a
// plain comma list.
std::vector<double> parse_sigma_grid(const std::string& s) {
    const auto c1 = s.find(':');
    if (c1 == std::string::npos) return parse_list(s);
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw CLI::ValidationError("sigma-grid", "want lo:hi:n[log]");
    const double lo = std::stod(s.substr(0, c1));
    const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    std::string tail = s.substr(c2 + 1);
    bool log_spaced = false;
    if (tail.ends_with("log")) {
        log_spaced = true;
        tail = tail.substr(0, tail.size() - 3);
    }
    const int n = std::stoi(tail);
    if (n < 1) throw CLI::ValidationError("sigma-grid", "count must be >= 1");
    if (n == 1) return {lo};
    if (log_spaced) return log_spaced_sigmas(lo, hi, n);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

void write_pores_csv(const std::vector<PoreComponent>& comps, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "id,cx,cy,cz,bbox_x,bbox_y,bbox_z,voxels\n";
    out.precision(17);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto c = comps[i].centroid();
        out << i << ',' << c[0] << ',' << c[1] << ',' << c[2] << ','
            << comps[i].extent(0) << ',' << comps[i].extent(1) << ',' << comps[i].extent(2)
            << ',' << comps[i].voxel_count << "\n";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"porovox: volumetric porosity analysis toolkit"};
    app.require_subcommand(1);

    // ---- phantom ----
    auto* cmd_phantom = app.add_subcommand("phantom", "generate a synthetic sample volume");
    std::string ph_out, ph_mask_out, ph_shape = "cylinder", ph_dims = "96,96,96";
    int ph_pores = 0;
    double ph_rmin = 2.0, ph_rmax = 5.0, ph_blur = 0.0, ph_noise = 0.0;
    double ph_background = 0.0, ph_material = 100.0;
    std::uint64_t ph_seed = 0;
    cmd_phantom->add_option("--out", ph_out)->required();
    cmd_phantom->add_option("--mask-out", ph_mask_out);
    cmd_phantom->add_option("--shape", ph_shape)->check(CLI::IsMember({"cylinder", "cube"}));
    cmd_phantom->add_option("--dims", ph_dims);
    cmd_phantom->add_option("--pores", ph_pores);
    cmd_phantom->add_option("--r-min", ph_rmin);
    cmd_phantom->add_option("--r-max", ph_rmax);
    cmd_phantom->add_option("--blur", ph_blur);
    cmd_phantom->add_option("--noise", ph_noise);
    cmd_phantom->add_option("--background", ph_background);
    cmd_phantom->add_option("--material", ph_material);
    cmd_phantom->add_option("--seed", ph_seed);

    // ---- label ----
    auto* cmd_label = app.add_subcommand("label", "heuristic pore labeling");
    std::string lb_in, lb_out, lb_report;
    int lb_min_dims = 2;
    cmd_label->add_option("input", lb_in)->required();
    cmd_label->add_option("--out", lb_out)->required();
    cmd_label->add_option("--min-dims", lb_min_dims);
    cmd_label->add_option("--report", lb_report);

    // ---- score ----
    auto* cmd_score = app.add_subcommand("score", "voxel-wise anomaly scoring");
    std::string sc_in, sc_scorer = "pca", sc_out_score, sc_out_recon;
    std::vector<std::string> sc_fit;
    int sc_patch = 64, sc_stride = -1;
    PcaScorerSpec sc_pca;
    std::uint64_t sc_seed = 0;
    cmd_score->add_option("input", sc_in)->required();
    cmd_score->add_option("--scorer", sc_scorer)->check(CLI::IsMember({"pca"}));
    cmd_score->add_option("--fit", sc_fit)->required();
    cmd_score->add_option("--out-score", sc_out_score)->required();
    cmd_score->add_option("--out-recon", sc_out_recon)->required();
    cmd_score->add_option("--patch", sc_patch);
    cmd_score->add_option("--stride", sc_stride);
    cmd_score->add_option("--pca-edge", sc_pca.patch_edge);
    cmd_score->add_option("--pca-k", sc_pca.components);
    cmd_score->add_option("--pca-stride", sc_pca.stride);
    cmd_score->add_option("--pca-samples", sc_pca.samples_per_volume);
    cmd_score->add_option("--seed", sc_seed);

    // ---- import-scores ----
    auto* cmd_import = app.add_subcommand("import-scores", "validate external score volumes");
    std::string im_score, im_recon, im_out_score, im_out_recon;
    cmd_import->add_option("--score", im_score)->required();
    cmd_import->add_option("--recon", im_recon)->required();
    cmd_import->add_option("--out-score", im_out_score);
    cmd_import->add_option("--out-recon", im_out_recon);

    // ---- postproc ----
    auto* cmd_post = app.add_subcommand("postproc", "surface suppression of anomaly scores");
    std::string pp_score, pp_recon, pp_mask, pp_out, pp_params_out, pp_sigma = "0.5:8:8log";
    cmd_post->add_option("--score", pp_score)->required();
    cmd_post->add_option("--recon", pp_recon)->required();
    cmd_post->add_option("--mask", pp_mask);
    cmd_post->add_option("--sigma-grid", pp_sigma);
    cmd_post->add_option("--out", pp_out)->required();
    cmd_post->add_option("--params-out", pp_params_out);

    // ---- eval ----
    auto* cmd_eval = app.add_subcommand("eval", "ROC/PR evaluation against labels");
    std::string ev_score, ev_labels, ev_mask, ev_out, ev_summary;
    cmd_eval->add_option("--score", ev_score)->required();
    cmd_eval->add_option("--labels", ev_labels)->required();
    cmd_eval->add_option("--mask", ev_mask);
    cmd_eval->add_option("--out", ev_out);
    cmd_eval->add_option("--summary", ev_summary);

    // ---- degrade ----
    auto* cmd_degrade = app.add_subcommand("degrade", "CT-degradation resimulation");
    std::string dg_in, dg_out;
    DegradeSpec dg_spec;
    bool dg_no_noise = false;
    cmd_degrade->add_option("input", dg_in)->required();
    cmd_degrade->add_option("--exposure", dg_spec.exposure_fraction);
    cmd_degrade->add_option("--projections", dg_spec.projection_fraction);
    cmd_degrade->add_option("--angles", dg_spec.base_angles);
    cmd_degrade->add_option("--i0", dg_spec.incident_intensity);
    cmd_degrade->add_option("--seed", dg_spec.seed);
    cmd_degrade->add_flag("--no-noise", dg_no_noise);
    cmd_degrade->add_option("--out", dg_out)->required();

    // ---- xval ----
    auto* cmd_xval = app.add_subcommand("xval", "k-fold cross-validation of the pipeline");
    std::string xv_config;
    cmd_xval->add_option("--config", xv_config)->required();

    // ---- grid ----
    auto* cmd_grid = app.add_subcommand("grid", "FTL parameter grid search");
    std::string gr_config, gr_grid;
    bool gr_single = false;
    cmd_grid->add_option("--config", gr_config)->required();
    cmd_grid->add_option("--grid", gr_grid);
    cmd_grid->add_flag("--single-phase", gr_single,
                       "run one grid instead of the two-phase alpha/beta then gamma recipe");

    // ---- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "degradation sweep");
    std::string sw_config, sw_exposures = "1,0.75,0.5,0.25", sw_projections = "1,0.5,0.333";
    int sw_angles = 720;
    double sw_i0 = 1e5;
    cmd_sweep->add_option("--config", sw_config)->required();
    cmd_sweep->add_option("--exposures", sw_exposures);
    cmd_sweep->add_option("--projections", sw_projections);
    cmd_sweep->add_option("--angles", sw_angles);
    cmd_sweep->add_option("--i0", sw_i0);

    CLI11_PARSE(app, argc, argv);

    if (cmd_phantom->parsed()) {
        PhantomSpec spec;
        spec.shape = ph_shape == "cube" ? PhantomShape::Cube : PhantomShape::Cylinder;
        spec.dims = parse_dims(ph_dims);
        spec.background = static_cast<float>(ph_background);
        spec.material = static_cast<float>(ph_material);
        spec.blur_sigma = ph_blur;
        spec.noise_sigma = ph_noise;
        spec.seed = ph_seed;
        if (ph_pores > 0)
            spec.pores = random_pores(spec, ph_pores, ph_rmin, ph_rmax, ph_seed + 1);
        auto [vol, gt] = generate_phantom(spec);
        save_volume(vol, ph_out);
        if (!ph_mask_out.empty()) save_mask(gt, ph_mask_out);
        std::cout << "phantom: " << vol.dims[0] << "x" << vol.dims[1] << "x" << vol.dims[2]
                  << ", " << spec.pores.size() << " pores\n";
    } else if (cmd_label->parsed()) {
        const Volume v = load_volume(lb_in);
        const PoreMask labels = extract_pore_labels(v, lb_min_dims);
        save_mask(labels.mask, lb_out);
        if (!lb_report.empty()) write_pores_csv(labels.components, lb_report);
        std::cout << "label: " << labels.components.size() << " pores, "
                  << labels.mask.count() << " voxels\n";
    } else if (cmd_score->parsed()) {
        const Volume v = load_volume(sc_in);
        std::vector<Volume> train;
        for (const auto& p : sc_fit) train.push_back(load_volume(p));
        const PcaScorer scorer = fit_pca_scorer(train, nullptr, sc_pca, sc_seed);
        const auto grid = plan_patches(v.dims, sc_patch, sc_stride);
        const ScoreVolume sv = score_volume(scorer, v, grid);
        save_volume(sv.score, sc_out_score);
        save_volume(sv.reconstruction, sc_out_recon);
        std::cout << "score: " << grid.patch_count() << " patches\n";
    } else if (cmd_import->parsed()) {
        const ImportedScores imported = import_scores(im_score, im_recon);
        if (!im_out_score.empty()) save_volume(imported.scores.score, im_out_score);
        if (!im_out_recon.empty()) save_volume(imported.scores.reconstruction, im_out_recon);
        std::cout << "import-scores: ok, clamped " << imported.clamped_negative_count
                  << " negatives\n";
    } else if (cmd_post->parsed()) {
        ScoreVolume sv;
        sv.score = load_volume(pp_score);
        sv.reconstruction = load_volume(pp_recon);
        Mask domain;
        const Mask* domain_ptr = nullptr;
        if (!pp_mask.empty()) {
            domain = load_mask(pp_mask);
            domain_ptr = &domain;
        }
        const auto sigmas = parse_sigma_grid(pp_sigma);
        const PostprocParams params = optimize_params(sv, sigmas, domain_ptr);
        const Volume suppressed = suppress_surface(sv, params);
        save_volume(suppressed, pp_out);
        if (!pp_params_out.empty()) {
            json j;
            j["lambda"] = params.lambda;
            j["sigma"] = params.sigma;
            std::ofstream out(pp_params_out);
            out << j.dump(2) << "\n";
        }
        std::cout << "postproc: lambda=" << params.lambda << " sigma=" << params.sigma << "\n";
    } else if (cmd_eval->parsed()) {
        const Volume score = load_volume(ev_score);
        const Mask labels = load_mask(ev_labels);
        Mask domain;
        const Mask* domain_ptr = nullptr;
        if (!ev_mask.empty()) {
            domain = load_mask(ev_mask);
            domain_ptr = &domain;
        }
        std::vector<double> s;
        std::vector<int> l;
        flatten_for_eval(score, labels, domain_ptr, s, l);
        const EvalCurves curves = evaluate_curves(s, l);
        if (!ev_out.empty()) write_curves_csv(curves, ev_out);
        if (!ev_summary.empty()) {
            json j;
            j["auc"] = curves.auc;
            j["ap"] = curves.ap;
            j["voxels"] = s.size();
            std::ofstream out(ev_summary);
            out << j.dump(2) << "\n";
        }
        std::cout << "eval: auc=" << curves.auc << " ap=" << curves.ap << "\n";
    } else if (cmd_degrade->parsed()) {
        dg_spec.noise_enabled = !dg_no_noise;
        const Volume v = load_volume(dg_in);
        const Volume out = degrade_volume(v, dg_spec);
        save_volume(out, dg_out);
        std::cout << "degrade: exposure=" << dg_spec.exposure_fraction
                  << " projections=" << dg_spec.projection_fraction << "\n";
    } else if (cmd_xval->parsed()) {
        const ExperimentConfig cfg = load_experiment_config(xv_config);
        const auto per_fold = prepare_fold_predictions(cfg);
        std::vector<double> aucs, aps;
        for (const auto& fold : per_fold) {
            double auc = 0.0, ap = 0.0;
            for (const auto& p : fold) {
                std::vector<double> s;
                std::vector<int> l;
                flatten_for_eval(p.prediction, p.target, nullptr, s, l);
                const EvalCurves curves = evaluate_curves(s, l);
                auc += curves.auc;
                ap += curves.ap;
            }
            aucs.push_back(auc / fold.size());
            aps.push_back(ap / fold.size());
        }
        const FoldSummary auc_summary = summarize_folds(aucs);
        const FoldSummary ap_summary = summarize_folds(aps);
        json j;
        j["config_hash"] = cfg.config_hash;
        j["seed"] = cfg.seed;
        j["fold_auc"] = aucs;
        j["fold_ap"] = aps;
        j["auc"] = {{"mean", auc_summary.mean}, {"stderr", auc_summary.stderr_of_mean}};
        j["ap"] = {{"mean", ap_summary.mean}, {"stderr", ap_summary.stderr_of_mean}};
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream out(std::filesystem::path(cfg.output_dir) / "xval_summary.json");
        out << j.dump(2) << "\n";
        std::cout << "xval: auc=" << auc_summary.mean << "+-" << auc_summary.stderr_of_mean
                  << " ap=" << ap_summary.mean << "+-" << ap_summary.stderr_of_mean << "\n";
    } else if (cmd_grid->parsed()) {
        const ExperimentConfig cfg = load_experiment_config(gr_config);
        const auto per_fold = prepare_fold_predictions(cfg);
        const MetricFn metric = pipeline_metric(per_fold);
        if (gr_single || !gr_grid.empty()) {
            const GridSpec spec =
                gr_grid.empty() ? GridSpec{default_alpha_beta_values(),
                                           default_alpha_beta_values(),
                                           {0.5}}
                                : load_grid_spec(gr_grid);
            const CrossValReport report =
                run_grid_search(spec, cfg.folds, metric, cfg.config_hash, cfg.seed);
            emit_report(report, cfg.output_dir, "grid");
            const auto& best = report.cells[report.best_index];
            std::cout << "grid: best alpha=" << best.alpha << " beta=" << best.beta
                      << " gamma=" << best.gamma << " mean=" << best.summary.mean << "\n";
        } else {
            const TwoPhaseResult result =
                run_two_phase_search(default_alpha_beta_values(), default_gamma_values(),
                                     cfg.folds, metric, cfg.config_hash, cfg.seed);
            emit_report(result.alpha_beta, cfg.output_dir, "grid_alpha_beta");
            emit_report(result.gamma, cfg.output_dir, "grid_gamma");
            std::cout << "grid: selected alpha=" << result.selected.alpha
                      << " beta=" << result.selected.beta
                      << " gamma=" << result.selected.gamma << "\n";
        }
    } else if (cmd_sweep->parsed()) {
        const ExperimentConfig cfg = load_experiment_config(sw_config);
        if (cfg.volumes.size() < 2)
            throw std::runtime_error("sweep: need at least 2 volumes (train + test)");
        // Last roster entry is the degradation test volume, the rest train
        // the scorer.
        std::vector<Volume> train;
        for (std::size_t i = 0; i + 1 < cfg.volumes.size(); ++i)
            train.push_back(load_volume(cfg.volumes[i].image));
        const Volume test = load_volume(cfg.volumes.back().image);
        const Mask gt = load_mask(cfg.volumes.back().labels);
        const PcaScorer scorer = fit_pca_scorer(train, nullptr, cfg.pca, cfg.seed);
        DegradeSpec base;
        base.base_angles = sw_angles;
        base.incident_intensity = sw_i0;
        base.seed = cfg.seed;
        const auto cells = run_degradation_sweep(
            test, gt, scorer, base, parse_list(sw_exposures), parse_list(sw_projections),
            cfg.patch_size, cfg.stride, log_spaced_sigmas());
        std::filesystem::create_directories(cfg.output_dir);
        emit_sweep_csv(cells,
                       (std::filesystem::path(cfg.output_dir) / "sweep.csv").string());
        std::cout << "sweep: " << cells.size() << " cells\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
