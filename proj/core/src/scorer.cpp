#include "porovox/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "porovox/volume_io.hpp"

namespace porovox {

namespace {

std::vector<float> vectorize_subpatch(const Volume& v, int ox, int oy, int oz, int edge) {
    std::vector<float> out(static_cast<std::size_t>(edge) * edge * edge);
    std::size_t i = 0;
    for (int z = 0; z < edge; ++z)
        for (int y = 0; y < edge; ++y)
            for (int x = 0; x < edge; ++x)
                out[i++] = v.at(ox + x, oy + y, oz + z);
    return out;
}

bool subpatch_in_mask(const Mask& m, int ox, int oy, int oz, int edge) {
    for (int z = 0; z < edge; ++z)
        for (int y = 0; y < edge; ++y)
            for (int x = 0; x < edge; ++x)
                if (!m.at(ox + x, oy + y, oz + z)) return false;
    return true;
}

// Sub-patch origins covering [0, dim) with the given stride; the final
// placement is clamped so the window always fits.
std::vector<int> axis_origins(int dim, int edge, int stride) {
    std::vector<int> out;
    if (dim <= edge) return {0};
    for (int o = 0; o + edge <= dim; o += stride) out.push_back(o);
    if (out.back() + edge < dim) out.push_back(dim - edge);
    return out;
}

} // namespace

PcaScorer fit_pca_scorer(const std::vector<Volume>& volumes,
                         const std::vector<Mask>* object_masks, const PcaScorerSpec& spec,
                         std::uint64_t seed) {
    const int edge = spec.patch_edge;
    const int d = edge * edge * edge;
    if (spec.components >= d)
        throw std::invalid_argument("fit_pca_scorer: components must be < patch_edge^3");
    if (volumes.empty()) throw std::invalid_argument("fit_pca_scorer: no training volumes");
    if (object_masks && object_masks->size() != volumes.size())
        throw std::invalid_argument("fit_pca_scorer: one mask per volume required");

    std::mt19937_64 rng(seed);
    std::vector<std::vector<float>> samples;
    for (std::size_t vi = 0; vi < volumes.size(); ++vi) {
        const Volume& v = volumes[vi];
        for (int a = 0; a < 3; ++a)
            if (v.dims[a] < edge)
                throw std::invalid_argument("fit_pca_scorer: volume smaller than sub-patch");
        std::uniform_int_distribution<int> ux(0, v.dims[0] - edge);
        std::uniform_int_distribution<int> uy(0, v.dims[1] - edge);
        std::uniform_int_distribution<int> uz(0, v.dims[2] - edge);
        int taken = 0, attempts = 0;
        const int max_attempts = spec.samples_per_volume * 50;
        while (taken < spec.samples_per_volume && attempts++ < max_attempts) {
            const int ox = ux(rng), oy = uy(rng), oz = uz(rng);
            if (object_masks && !subpatch_in_mask((*object_masks)[vi], ox, oy, oz, edge))
                continue;
            samples.push_back(vectorize_subpatch(v, ox, oy, oz, edge));
            ++taken;
        }
    }
    const auto n = samples.size();
    if (n < static_cast<std::size_t>(10 * spec.components))
        throw std::runtime_error("fit_pca_scorer: insufficient samples (need >= 10*k)");

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& s : samples)
        for (int i = 0; i < d; ++i) mean[i] += s[i];
    mean /= static_cast<double>(n);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd c(d);
    for (const auto& s : samples) {
        for (int i = 0; i < d; ++i) c[i] = s[i] - mean[i];
        cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
    }
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("fit_pca_scorer: eigendecomposition failed");

    const auto& evals = eig.eigenvalues(); // ascending
    const double lmax = std::max(evals[d - 1], 0.0);
    int rank = 0;
    for (int i = 0; i < d; ++i)
        if (evals[i] > 1e-10 * std::max(lmax, 1e-30)) ++rank;

    int k = spec.components;
    if (rank < k) {
        std::cerr << "fit_pca_scorer: data rank " << rank << " below requested k " << k
                  << ", reducing\n";
        k = std::max(rank, 1);
    }

    PcaScorer s;
    s.edge_ = edge;
    s.k_ = k;
    s.stride_ = spec.stride;
    s.mean_.resize(d);
    for (int i = 0; i < d; ++i) s.mean_[i] = static_cast<float>(mean[i]);
    s.basis_.resize(k, std::vector<float>(d));
    for (int j = 0; j < k; ++j) {
        const auto col = eig.eigenvectors().col(d - 1 - j);
        for (int i = 0; i < d; ++i) s.basis_[j][i] = static_cast<float>(col[i]);
    }
    s.fitted_ = true;
    return s;
}

double PcaScorer::basis_orthonormality_error() const {
    const int d = edge_ * edge_ * edge_;
    double worst = 0.0;
    for (int a = 0; a < k_; ++a)
        for (int b = a; b < k_; ++b) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i)
                dot += static_cast<double>(basis_[a][i]) * basis_[b][i];
            worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

std::vector<float> PcaScorer::reconstruct_subpatch(const std::vector<float>& x) const {
    if (!fitted_) throw std::logic_error("PcaScorer: not fitted");
    const int d = edge_ * edge_ * edge_;
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("PcaScorer: sub-patch size mismatch");
    std::vector<double> centered(d);
    for (int i = 0; i < d; ++i) centered[i] = static_cast<double>(x[i]) - mean_[i];
    std::vector<float> recon(mean_.begin(), mean_.end());
    for (int j = 0; j < k_; ++j) {
        double coeff = 0.0;
        for (int i = 0; i < d; ++i) coeff += centered[i] * basis_[j][i];
        for (int i = 0; i < d; ++i)
            recon[i] = static_cast<float>(recon[i] + coeff * basis_[j][i]);
    }
    return recon;
}

void PcaScorer::score(const Volume& patch, Volume& score_out, Volume& recon_out) const {
    if (!fitted_) throw std::logic_error("PcaScorer: not fitted");
    const auto ox = axis_origins(patch.dims[0], edge_, stride_);
    const auto oy = axis_origins(patch.dims[1], edge_, stride_);
    const auto oz = axis_origins(patch.dims[2], edge_, stride_);
    for (int a = 0; a < 3; ++a)
        if (patch.dims[a] < edge_)
            throw std::invalid_argument("PcaScorer: patch smaller than sub-patch edge");

    std::vector<double> sum(patch.size(), 0.0);
    std::vector<std::uint32_t> cnt(patch.size(), 0);
    for (int z : oz)
        for (int y : oy)
            for (int x : ox) {
                const auto sp = vectorize_subpatch(patch, x, y, z, edge_);
                const auto rec = reconstruct_subpatch(sp);
                std::size_t i = 0;
                for (int dz = 0; dz < edge_; ++dz)
                    for (int dy = 0; dy < edge_; ++dy)
                        for (int dx = 0; dx < edge_; ++dx) {
                            const auto vi = patch.index(x + dx, y + dy, z + dz);
                            sum[vi] += rec[i++];
                            ++cnt[vi];
                        }
            }

    recon_out = Volume(patch.dims, 0.0f, patch.spacing);
    score_out = Volume(patch.dims, 0.0f, patch.spacing);
    for (std::size_t i = 0; i < patch.size(); ++i) {
        const float rec = static_cast<float>(sum[i] / cnt[i]);
        recon_out.data[i] = rec;
        score_out.data[i] = std::abs(patch.data[i] - rec);
    }
}

ScoreVolume score_volume(const AnomalyScorer& scorer, const Volume& v, const PatchGrid& grid) {
    if (v.dims != grid.dims) throw std::invalid_argument("score_volume: grid mismatch");
    PatchAggregator agg_score(grid), agg_recon(grid);
    Volume s, r;
    for (std::size_t i = 0; i < grid.patch_count(); ++i) {
        const Volume p = extract_patch(v, grid, i);
        scorer.score(p, s, r);
        if (s.dims != p.dims || r.dims != p.dims)
            throw std::runtime_error("score_volume: scorer changed patch dims");
        agg_score.add(i, s);
        agg_recon.add(i, r);
    }
    ScoreVolume out;
    out.score = agg_score.finalize();
    out.reconstruction = agg_recon.finalize();
    out.score.spacing = v.spacing;
    out.reconstruction.spacing = v.spacing;
    for (float& x : out.score.data) x = std::max(x, 0.0f);
    return out;
}

ImportedScores import_scores(const std::string& score_path, const std::string& recon_path) {
    ImportedScores out;
    out.scores.score = load_volume(score_path);
    out.scores.reconstruction = load_volume(recon_path);
    if (out.scores.score.dims != out.scores.reconstruction.dims)
        throw std::runtime_error("import_scores: score/reconstruction dims mismatch");
    for (float& x : out.scores.score.data)
        if (x < 0.0f) {
            x = 0.0f;
            ++out.clamped_negative_count;
        }
    if (out.clamped_negative_count > 0)
        std::cerr << "import_scores: clamped " << out.clamped_negative_count
                  << " negative scores to 0\n";
    return out;
}

PoreMask scores_to_labels(const ScoreVolume& sv, double threshold, int min_dims) {
    if (!std::isfinite(threshold))
        throw std::invalid_argument("scores_to_labels: non-finite threshold");
    Mask bin(sv.score.dims, 0, sv.score.spacing);
    for (std::size_t i = 0; i < sv.score.size(); ++i)
        bin.data[i] = sv.score.data[i] >= threshold ? 1 : 0;
    auto comps = filter_small_pores(connected_components(bin), min_dims);
    PoreMask out;
    out.mask = components_to_mask(comps, sv.score.dims, sv.score.spacing);
    out.components = std::move(comps);
    return out;
}

} // namespace porovox
