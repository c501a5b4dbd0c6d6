// Acceptance suite: one pass/fail line per criterion; exit code = number of
// failures. argv[1] (optional) is the path to the porovox CLI, used by the
// determinism criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

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
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, double seconds,
            const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << " " << name << " (" << std::fixed
              << std::setprecision(1) << seconds << "s)";
    if (!detail.empty()) std::cout << " " << detail;
    std::cout << "\n" << std::defaultfloat;
    if (!ok) ++g_failures;
}

struct Timer {
    clock_type::time_point t0 = clock_type::now();
    double elapsed() const {
        return std::chrono::duration<double>(clock_type::now() - t0).count();
    }
};

double auc_brute_force(const std::vector<double>& scores, const std::vector<int>& labels) {
    double pairs = 0.0, correct = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (!(labels[i] == 1 && labels[j] == 0)) continue;
            pairs += 1.0;
            if (scores[i] > scores[j])
                correct += 1.0;
            else if (scores[i] == scores[j])
                correct += 0.5;
        }
    return correct / pairs;
}

double ap_brute_force(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double total_pos = 0;
    for (int l : labels) total_pos += l;
    double ap = 0.0, tp = 0.0, seen = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        double block_pos = 0.0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            block_pos += labels[order[j]];
            ++j;
        }
        tp += block_pos;
        seen += static_cast<double>(j - i);
        ap += block_pos * (tp / seen);
        i = j;
    }
    return ap / total_pos;
}

struct IdentityScorer : AnomalyScorer {
    void score(const Volume& patch, Volume& score_out, Volume& recon_out) const override {
        recon_out = patch;
        score_out = Volume(patch.dims, 0.0f, patch.spacing);
    }
};

// ---- 1: loss reduces to soft Dice at alpha = beta = 0.5, gamma = 1 ----
void criterion_1() {
    Timer t;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::bernoulli_distribution coin(0.3);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 20 + static_cast<int>(rng() % 200);
        Volume p({n, 1, 1});
        Mask gt({n, 1, 1});
        for (float& x : p.data) x = u(rng);
        for (auto& x : gt.data) x = coin(rng) ? 1 : 0;
        const FTLParams params{0.5, 0.5, 1.0, 1e-6};
        const double ftl = focal_tversky_loss(p, gt, params);
        const SoftCounts c = soft_counts(p, gt);
        // Soft Dice with the same smoothing convention (numerator and
        // denominator both carry 2s once the Tversky form is scaled by 2).
        const double dice = (2.0 * c.tp + 2.0 * params.smooth) /
                            (2.0 * c.tp + c.fn + c.fp + 2.0 * params.smooth);
        worst = std::max(worst, std::abs(ftl - (1.0 - dice)));
    }
    std::ostringstream d;
    d << "max|FTL-(1-dice)|=" << worst;
    report(1, "loss reduces to soft dice", worst < 1e-9 && t.elapsed() < 5.0, t.elapsed(),
           d.str());
}

// ---- 2: AUC/AP equal brute-force pair and rank evaluation ----
void criterion_2() {
    Timer t;
    std::mt19937_64 rng(2);
    double worst_auc = 0.0, worst_ap = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 46);
        std::vector<double> s(n);
        std::vector<int> l(n);
        // Coarse score grid forces plenty of ties.
        for (int i = 0; i < n; ++i) s[i] = 0.1 * static_cast<double>(rng() % 10);
        int pos = 0;
        for (int i = 0; i < n; ++i) {
            l[i] = rng() % 2;
            pos += l[i];
        }
        if (pos == 0) l[0] = 1;
        if (pos == n) l[0] = 0;
        const EvalCurves c = evaluate_curves(s, l);
        worst_auc = std::max(worst_auc, std::abs(c.auc - auc_brute_force(s, l)));
        worst_ap = std::max(worst_ap, std::abs(c.ap - ap_brute_force(s, l)));
    }
    std::ostringstream d;
    d << "max dAUC=" << worst_auc << " max dAP=" << worst_ap;
    report(2, "metric oracles", worst_auc < 1e-12 && worst_ap < 1e-12 && t.elapsed() < 10.0,
           t.elapsed(), d.str());
}

// ---- 3: exact weighted-median lambda beats a dense grid ----
void criterion_3() {
    Timer t;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        Volume a({50, 1, 1}), b({50, 1, 1});
        for (float& x : a.data) x = 2.0f * u(rng);
        for (float& x : b.data) x = 0.01f + u(rng);
        const double lambda = optimal_lambda(a, b);
        const double obj = postproc_objective(a, b, lambda);
        for (int i = 0; i < 2000; ++i) {
            const double probe = i * 4.0 / 1999.0;
            if (obj > postproc_objective(a, b, probe) + 1e-12) ok = false;
        }
    }
    report(3, "lambda optimizer exactness", ok && t.elapsed() < 10.0, t.elapsed());
}

// ---- 4: heuristic labeling end to end on a 256^3 phantom ----
void criterion_4() {
    Timer t;
    PhantomSpec spec;
    spec.dims = {256, 256, 256};
    spec.material = 100.0f;
    spec.blur_sigma = 0.8;
    spec.noise_sigma = 3.0;
    spec.seed = 4;
    spec.pores = random_pores(spec, 30, 2.0, 6.0, 40);
    auto [v, gt] = generate_phantom(spec);

    // Single-voxel decoys punched into the solid after generation; all must
    // be rejected by the min-dims filter.
    std::vector<std::array<int, 3>> decoys;
    std::mt19937_64 rng(44);
    while (decoys.size() < 10) {
        const int x = 64 + static_cast<int>(rng() % 128);
        const int y = 64 + static_cast<int>(rng() % 128);
        const int z = 32 + static_cast<int>(rng() % 192);
        if (!phantom_solid_contains(spec, x, y, z)) continue;
        bool clear = true;
        for (const auto& p : spec.pores) {
            const double dx = x - p.center[0], dy = y - p.center[1], dz = z - p.center[2];
            const double rr = std::max({p.radii[0], p.radii[1], p.radii[2]}) + 6.0;
            if (dx * dx + dy * dy + dz * dz < rr * rr) clear = false;
        }
        for (const auto& q : decoys)
            if (std::abs(q[0] - x) + std::abs(q[1] - y) + std::abs(q[2] - z) < 8) clear = false;
        if (!clear) continue;
        v.at(x, y, z) = spec.background;
        decoys.push_back({x, y, z});
    }

    const PoreMask labels = extract_pore_labels(v, 2);
    const double dice = dice_score(labels.mask, gt);

    int recovered = 0;
    for (const auto& p : spec.pores) {
        const int cx = static_cast<int>(std::lround(p.center[0]));
        const int cy = static_cast<int>(std::lround(p.center[1]));
        const int cz = static_cast<int>(std::lround(p.center[2]));
        if (labels.mask.at(cx, cy, cz)) ++recovered;
    }
    bool decoys_rejected = true;
    for (const auto& q : decoys)
        if (labels.mask.at(q[0], q[1], q[2])) decoys_rejected = false;

    std::ostringstream d;
    d << "dice=" << dice << " recovered=" << recovered << "/30 decoys_rejected="
      << (decoys_rejected ? "yes" : "no");
    report(4, "heuristic labeling end to end",
           dice >= 0.90 && recovered >= 28 && decoys_rejected && t.elapsed() < 60.0,
           t.elapsed(), d.str());
}

// ---- 5: surface suppression raises AP while AUC stays put ----
// Pores placed well inside the cylinder, so surface suppression cannot clip
// true-positive scores through its smoothing kernel.
std::vector<PhantomPore> interior_pores(const PhantomSpec& spec, int n, double r_min,
                                        double r_max, std::uint64_t seed, double margin) {
    const double cx = (spec.dims[0] - 1) / 2.0;
    const double cy = (spec.dims[1] - 1) / 2.0;
    const double cyl_radius = 0.42 * std::min(spec.dims[0], spec.dims[1]);
    const int mz = std::max(2, spec.dims[2] / 16);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(r_min, r_max);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * 3.14159265358979323846);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    std::uniform_real_distribution<double> uz(mz + margin + r_max,
                                              spec.dims[2] - 1.0 - mz - margin - r_max);
    std::vector<PhantomPore> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < n && attempts++ < 200000) {
        PhantomPore p;
        const double r = ur(rng);
        p.radii = {r, r, r};
        const double d = (cyl_radius - r - margin) * std::sqrt(uu(rng));
        const double th = uang(rng);
        p.center = {cx + d * std::cos(th), cy + d * std::sin(th), uz(rng)};
        bool clash = false;
        for (const auto& q : out) {
            double d2 = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double dd = p.center[a] - q.center[a];
                d2 += dd * dd;
            }
            const double min_sep = p.radii[0] + q.radii[0] + 4.0;
            if (d2 < min_sep * min_sep) { clash = true; break; }
        }
        if (!clash) out.push_back(p);
    }
    if (static_cast<int>(out.size()) < n)
        throw std::runtime_error("interior_pores: placement failed");
    return out;
}

void criterion_5() {
    Timer t;
    // Train on a sharp scan of the poreless part; evaluate a softer (coarser
    // focal spot) scan of a pore-bearing one. The resolution mismatch makes
    // the object surface the dominant residual source, which is exactly the
    // false-positive population the suppression step is meant to remove.
    PhantomSpec train_spec;
    train_spec.dims = {64, 64, 64};
    train_spec.material = 100.0f;
    train_spec.blur_sigma = 0.5;
    train_spec.noise_sigma = 2.0;
    train_spec.seed = 51;
    const auto [train_vol, train_gt] = generate_phantom(train_spec);

    PhantomSpec test_spec = train_spec;
    test_spec.seed = 52;
    test_spec.blur_sigma = 2.0;
    test_spec.pores = interior_pores(test_spec, 14, 2.5, 4.5, 53, 8.0);
    const auto [test_vol, test_gt] = generate_phantom(test_spec);

    PcaScorerSpec scorer_spec;
    scorer_spec.components = 4; // low-capacity basis: cannot absorb pore blobs
    const PcaScorer scorer = fit_pca_scorer({train_vol}, nullptr, scorer_spec, 54);
    const auto grid = plan_patches(test_spec.dims, 32, 16);
    const ScoreVolume sv = score_volume(scorer, test_vol, grid);

    std::vector<double> s_before, s_after;
    std::vector<int> l_before, l_after;
    flatten_for_eval(sv.score, test_gt, nullptr, s_before, l_before);
    const PostprocParams params = optimize_params(sv, log_spaced_sigmas());
    const Volume suppressed = suppress_surface(sv, params);
    flatten_for_eval(suppressed, test_gt, nullptr, s_after, l_after);

    const EvalCurves before = evaluate_curves(s_before, l_before);
    const EvalCurves after = evaluate_curves(s_after, l_after);
    const double dap = after.ap - before.ap;
    const double dauc = std::abs(after.auc - before.auc);

    std::ostringstream d;
    d << "ap " << before.ap << "->" << after.ap << " auc " << before.auc << "->" << after.auc;
    report(5, "surface suppression benefit", dap >= 0.05 && dauc < 0.02 && t.elapsed() < 120.0,
           t.elapsed(), d.str());
}

// ---- 6: identity scorer through the patch pipeline ----
void criterion_6() {
    Timer t;
    Volume v({100, 100, 100});
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (float& x : v.data) x = u(rng);

    const auto grid = plan_patches(v.dims, 64, 32);
    const ScoreVolume sv = score_volume(IdentityScorer{}, v, grid);
    float worst = 0.0f;
    for (std::size_t i = 0; i < v.size(); ++i)
        worst = std::max(worst, std::abs(sv.reconstruction.data[i] - v.data[i]));

    std::vector<Volume> ones(grid.patch_count(), Volume({64, 64, 64}, 1.0f));
    const Volume unity = aggregate(ones, grid);
    float worst_unity = 0.0f;
    for (float x : unity.data) worst_unity = std::max(worst_unity, std::abs(x - 1.0f));

    std::ostringstream d;
    d << "max|recon-v|=" << worst << " max|w-1|=" << worst_unity;
    report(6, "patch pipeline identity",
           worst < 1e-6f && worst_unity < 1e-6f && t.elapsed() < 10.0, t.elapsed(), d.str());
}

// ---- 7: degradation trend ----
void criterion_7() {
    Timer t;
    PhantomSpec clean;
    clean.dims = {64, 64, 64};
    clean.material = 0.02f; // attenuation units for the transmission model
    clean.blur_sigma = 0.8;
    clean.seed = 71;
    const auto [train_vol, train_gt] = generate_phantom(clean);

    PhantomSpec with_pores = clean;
    with_pores.seed = 72;
    with_pores.pores = random_pores(with_pores, 8, 3.0, 5.0, 73);
    const auto [test_vol, test_gt] = generate_phantom(with_pores);

    const PcaScorer scorer = fit_pca_scorer({train_vol}, nullptr, PcaScorerSpec{}, 74);
    const auto grid = plan_patches(clean.dims, 32, 16);

    const std::vector<double> exposures{1.0, 0.75, 0.5, 0.25};
    std::vector<double> aps;
    for (double e : exposures) {
        DegradeSpec d;
        d.exposure_fraction = e;
        d.base_angles = 360;
        d.seed = 75;
        const Volume deg = degrade_volume(test_vol, d);
        const ScoreVolume sv = score_volume(scorer, deg, grid);
        std::vector<double> s;
        std::vector<int> l;
        flatten_for_eval(sv.score, test_gt, nullptr, s, l);
        aps.push_back(evaluate_curves(s, l).ap);
    }
    bool trend = true;
    for (std::size_t i = 1; i < aps.size(); ++i)
        if (aps[i] > aps[i - 1] + 0.02) trend = false;

    // Projection-noise sigma must scale as 1/sqrt(exposure).
    const int n = 64;
    std::vector<float> slice(static_cast<std::size_t>(n) * n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            slice[static_cast<std::size_t>(x) + static_cast<std::size_t>(n) * y] =
                test_vol.at(x, y, 32);
    const Sinogram ref = radon2d(slice, n, subsampled_angles(180, 1.0));
    auto sigma_at = [&](double e) {
        Sinogram s = ref;
        apply_transmission_noise(s, e, 1e5, 76);
        double acc = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const double diff = s.values[i] - ref.values[i];
            acc += diff * diff;
        }
        return std::sqrt(acc / s.values.size());
    };
    const double s_full = sigma_at(1.0);
    bool scaling = true;
    for (double e : {0.75, 0.5, 0.25}) {
        const double expected = s_full / std::sqrt(e);
        if (std::abs(sigma_at(e) - expected) / expected > 0.10) scaling = false;
    }

    std::ostringstream d;
    d << "ap@{1,.75,.5,.25}=";
    for (double ap : aps) d << ap << " ";
    d << "sigma_scaling=" << (scaling ? "ok" : "off");
    report(7, "degradation trend", trend && scaling && t.elapsed() < 300.0, t.elapsed(),
           d.str());
}

// ---- 8: search protocol bookkeeping ----
void criterion_8() {
    Timer t;
    const auto ab = default_alpha_beta_values();
    const auto gammas = default_gamma_values();
    const double a0 = ab[2], b0 = ab[0], g0 = gammas[5];
    const MetricFn metric = [&](const FTLParams& p, int) {
        return 1.0 - std::abs(p.alpha - a0) - std::abs(p.beta - b0) -
               0.1 * std::abs(p.gamma - g0);
    };
    const TwoPhaseResult res = run_two_phase_search(ab, gammas, 5, metric);
    const bool count_ok = res.alpha_beta.evaluation_count == 80;
    const bool optimum_ok = std::abs(res.selected.alpha - a0) < 1e-12 &&
                            std::abs(res.selected.beta - b0) < 1e-12 &&
                            std::abs(res.selected.gamma - g0) < 1e-12;
    std::ostringstream d;
    d << "phase1_evals=" << res.alpha_beta.evaluation_count;
    report(8, "search protocol", count_ok && optimum_ok && t.elapsed() < 30.0, t.elapsed(),
           d.str());
}

// ---- 9: CLI determinism ----
bool run_cli_sequence(const std::string& cli, const fs::path& dir) {
    fs::create_directories(dir);
    const std::string d = dir.string();
    const std::vector<std::string> cmds = {
        cli + " phantom --out " + d + "/v.json --mask-out " + d +
            "/m.json --dims 32,32,32 --pores 3 --r-min 2.5 --r-max 4 --blur 0.6 --noise 2 "
            "--seed 5",
        cli + " label " + d + "/v.json --out " + d + "/lab.json --report " + d + "/pores.csv",
        cli + " score " + d + "/v.json --fit " + d + "/v.json --out-score " + d +
            "/a.json --out-recon " + d +
            "/r.json --patch 16 --pca-edge 4 --pca-k 4 --pca-samples 200 --seed 3",
        cli + " postproc --score " + d + "/a.json --recon " + d + "/r.json --out " + d +
            "/s.json --params-out " + d + "/p.json",
        cli + " eval --score " + d + "/s.json --labels " + d + "/m.json --out " + d +
            "/curves.csv --summary " + d + "/summary.json",
        cli + " degrade " + d + "/v.json --angles 90 --exposure 0.5 --seed 2 --out " + d +
            "/dg.json",
    };
    for (const auto& c : cmds)
        if (std::system((c + " > /dev/null").c_str()) != 0) return false;
    return true;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

void criterion_9(const char* cli_path) {
    Timer t;
    if (!cli_path) {
        report(9, "cli determinism", false, t.elapsed(), "no CLI path given");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "porovox_accept";
    const fs::path run1 = base / "run1";
    const fs::path run2 = base / "run2";
    fs::remove_all(base);
    bool ok = run_cli_sequence(cli_path, run1) && run_cli_sequence(cli_path, run2);
    std::string bad;
    if (ok)
        for (const auto& entry : fs::directory_iterator(run1)) {
            const auto name = entry.path().filename();
            if (!same_bytes(entry.path(), run2 / name)) {
                ok = false;
                bad = name.string();
            }
        }
    report(9, "cli determinism", ok, t.elapsed(), bad.empty() ? "" : "differs: " + bad);
}

} // namespace

int main(int argc, char** argv) {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(argc > 1 ? argv[1] : nullptr);
    return g_failures;
}
