#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "porovox/phantom.hpp"
#include "porovox/scorer.hpp"
#include "porovox/volume_io.hpp"

using namespace porovox;

namespace {

Volume random_volume(std::array<int, 3> dims, std::uint64_t seed) {
    Volume v(dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (float& x : v.data) x = u(rng);
    return v;
}

// Reconstruction = input, so the residual is identically zero.
struct IdentityScorer : AnomalyScorer {
    void score(const Volume& patch, Volume& score_out, Volume& recon_out) const override {
        recon_out = patch;
        score_out = Volume(patch.dims, 0.0f, patch.spacing);
    }
};

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("pca fit on constant volumes gives zero residual on constant input") {
    std::vector<Volume> train(2, Volume({24, 24, 24}, 7.0f));
    PcaScorerSpec spec;
    spec.components = 4;
    const PcaScorer s = fit_pca_scorer(train, nullptr, spec, 1);
    CHECK(s.fitted());
    CHECK(s.components() >= 1); // rank collapse reduces k

    Volume patch({16, 16, 16}, 7.0f);
    Volume a, r;
    s.score(patch, a, r);
    for (float x : a.data) CHECK(x == doctest::Approx(0.0f).epsilon(1e-5));
}

TEST_CASE("rank-1 training data is reconstructed exactly with k=1") {
    // Voxel-parity pattern: every sub-patch, at any origin, is +-1 times the
    // same checkerboard, so the sample cloud spans a single direction.
    Volume base({32, 32, 32});
    for (int z = 0; z < 32; ++z)
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                base.at(x, y, z) = ((x + y + z) % 2) ? 0.8f : -0.8f;
    std::vector<Volume> train;
    for (int i = 0; i < 2; ++i) {
        Volume v = base;
        const float scale = 1.0f + 0.5f * i;
        for (float& x : v.data) x *= scale;
        train.push_back(std::move(v));
    }
    PcaScorerSpec spec;
    spec.components = 1;
    const PcaScorer s = fit_pca_scorer(train, nullptr, spec, 2);

    Volume a, r;
    s.score(train[0], a, r);
    for (float x : a.data) CHECK(x == doctest::Approx(0.0f).epsilon(1e-4));
}

TEST_CASE("fitted basis is orthonormal") {
    std::vector<Volume> train{random_volume({32, 32, 32}, 3)};
    PcaScorerSpec spec;
    const PcaScorer s = fit_pca_scorer(train, nullptr, spec, 3);
    CHECK(s.basis_orthonormality_error() < 1e-6);
}

TEST_CASE("pca residual ignores components inside the fitted subspace") {
    std::vector<Volume> train{random_volume({32, 32, 32}, 13)};
    PcaScorerSpec spec;
    spec.components = 8;
    const PcaScorer s = fit_pca_scorer(train, nullptr, spec, 13);

    const int d = 8 * 8 * 8;
    std::vector<float> x(d);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (float& xi : x) xi = u(rng);
    const auto rec = s.reconstruct_subpatch(x);
    std::vector<double> residual(d);
    for (int i = 0; i < d; ++i) residual[i] = static_cast<double>(x[i]) - rec[i];

    // Shifting x along the first basis direction leaves the residual intact.
    std::vector<float> x2 = x;
    {
        // Recover the direction as the reconstruction difference of a unit
        // perturbation along it.
        std::vector<float> probe(s.reconstruct_subpatch(std::vector<float>(d, 0.0f)));
        // Instead, perturb along rec(x) - rec(0) which lies in the subspace.
        for (int i = 0; i < d; ++i) x2[i] += 0.5f * (rec[i] - probe[i]);
    }
    const auto rec2 = s.reconstruct_subpatch(x2);
    for (int i = 0; i < d; ++i) {
        const double r2 = static_cast<double>(x2[i]) - rec2[i];
        CHECK(std::abs(r2 - residual[i]) < 1e-4);
    }
}

TEST_CASE("insufficient samples are rejected") {
    std::vector<Volume> train{Volume({8, 8, 8}, 1.0f)};
    PcaScorerSpec spec;
    spec.components = 16;
    spec.samples_per_volume = 10; // < 10*k
    CHECK_THROWS(fit_pca_scorer(train, nullptr, spec, 1));
}

TEST_CASE("identity scorer yields an all-zero score volume") {
    const Volume v = random_volume({40, 40, 40}, 17);
    const auto grid = plan_patches(v.dims, 16, 8);
    const ScoreVolume sv = score_volume(IdentityScorer{}, v, grid);
    for (float x : sv.score.data) CHECK(x == 0.0f);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(std::abs(sv.reconstruction.data[i] - v.data[i]) < 1e-6f);
}

TEST_CASE("score volumes are deterministic across calls") {
    PhantomSpec pspec;
    pspec.dims = {48, 48, 48};
    pspec.blur_sigma = 0.8;
    pspec.noise_sigma = 2.0;
    pspec.seed = 4;
    const auto [v, gt] = generate_phantom(pspec);
    const PcaScorer s = fit_pca_scorer({v}, nullptr, PcaScorerSpec{}, 9);
    const auto grid = plan_patches(v.dims, 32, 16);
    const ScoreVolume a = score_volume(s, v, grid);
    const ScoreVolume b = score_volume(s, v, grid);
    CHECK(a.score.data == b.score.data);
    CHECK(a.reconstruction.data == b.reconstruction.data);
}

TEST_CASE("pore-bearing phantom scores higher than a poreless one") {
    PhantomSpec clean;
    clean.dims = {64, 64, 64};
    clean.blur_sigma = 0.8;
    clean.noise_sigma = 1.0;
    clean.seed = 21;
    const auto [train_vol, train_gt] = generate_phantom(clean);

    PhantomSpec withpores = clean;
    withpores.seed = 22;
    withpores.pores = random_pores(withpores, 6, 2.5, 4.5, 23);
    const auto [test_vol, test_gt] = generate_phantom(withpores);

    const PcaScorer s = fit_pca_scorer({train_vol}, nullptr, PcaScorerSpec{}, 25);
    const auto grid = plan_patches(clean.dims, 32, 16);
    const ScoreVolume sv_clean = score_volume(s, train_vol, grid);
    const ScoreVolume sv_pores = score_volume(s, test_vol, grid);

    auto percentile = [](std::vector<float> xs, double q) {
        std::sort(xs.begin(), xs.end());
        return xs[static_cast<std::size_t>(q * (xs.size() - 1))];
    };
    CHECK(percentile(sv_clean.score.data, 0.99) < percentile(sv_pores.score.data, 0.999));
}

TEST_CASE("score import round trip and validation") {
    const Volume a = random_volume({8, 8, 8}, 31);
    Volume recon = random_volume({8, 8, 8}, 32);
    const auto pa = tmp_path("porovox_sc_a.json");
    const auto pr = tmp_path("porovox_sc_r.json");
    save_volume(a, pa);
    save_volume(recon, pr);

    SUBCASE("round trip") {
        const ImportedScores imp = import_scores(pa, pr);
        CHECK(imp.scores.score.data == a.data);
        CHECK(imp.clamped_negative_count == 0);
    }
    SUBCASE("dims mismatch") {
        save_volume(random_volume({6, 6, 6}, 33), pr);
        CHECK_THROWS(import_scores(pa, pr));
    }
    SUBCASE("negative scores are clamped and counted") {
        Volume neg = a;
        neg.data[0] = -1.0f;
        neg.data[5] = -0.25f;
        save_volume(neg, pa);
        const ImportedScores imp = import_scores(pa, pr);
        CHECK(imp.clamped_negative_count == 2);
        CHECK(imp.scores.score.data[0] == 0.0f);
    }
}

TEST_CASE("score thresholds convert to labels with small-component rejection") {
    ScoreVolume sv;
    sv.score = Volume({16, 16, 16}, 0.0f);
    sv.reconstruction = Volume({16, 16, 16}, 0.0f);
    // One 3^3 blob and one isolated voxel.
    for (int z = 2; z < 5; ++z)
        for (int y = 2; y < 5; ++y)
            for (int x = 2; x < 5; ++x) sv.score.at(x, y, z) = 1.0f;
    sv.score.at(10, 10, 10) = 1.0f;

    SUBCASE("threshold above max gives empty mask") {
        const PoreMask m = scores_to_labels(sv, 2.0);
        CHECK(m.components.empty());
    }
    SUBCASE("only the large blob survives filtering") {
        const PoreMask m = scores_to_labels(sv, 0.5);
        REQUIRE(m.components.size() == 1);
        CHECK(m.components[0].voxel_count == 27);
    }
    SUBCASE("binarization is monotone in the threshold") {
        const PoreMask lo = scores_to_labels(sv, 0.5, 1);
        const PoreMask hi = scores_to_labels(sv, 1.5, 1);
        for (std::size_t i = 0; i < lo.mask.size(); ++i)
            if (hi.mask.data[i]) CHECK(lo.mask.data[i] == 1);
    }
}
