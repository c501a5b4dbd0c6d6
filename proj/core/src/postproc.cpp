#include "porovox/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "porovox/filters.hpp"

namespace porovox {

Volume suppress_surface(const ScoreVolume& sv, const PostprocParams& p) {
    if (sv.score.dims != sv.reconstruction.dims)
        throw std::invalid_argument("suppress_surface: score/reconstruction dims mismatch");
    if (sv.reconstruction.data.empty())
        throw std::invalid_argument("suppress_surface: missing reconstruction");
    const Volume field = gaussian_blur3d(gradient_l1(sv.reconstruction), p.sigma);
    Volume out = sv.score;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = std::max(
            0.0f, static_cast<float>(out.data[i] - p.lambda * field.data[i]));
    return out;
}

double optimal_lambda(const Volume& a, const Volume& b, const Mask* domain) {
    if (a.dims != b.dims) throw std::invalid_argument("optimal_lambda: dims mismatch");
    if (domain && domain->dims != a.dims)
        throw std::invalid_argument("optimal_lambda: domain dims mismatch");

    // mean |A - lambda B| = sum_i B_i |A_i/B_i - lambda| / n (+ const terms
    // where B_i = 0), minimized at the B-weighted median of the ratios.
    std::vector<std::pair<double, double>> ratio_weight;
    double total_w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (domain && !domain->data[i]) continue;
        const double bi = b.data[i];
        if (bi > 0.0) {
            ratio_weight.emplace_back(static_cast<double>(a.data[i]) / bi, bi);
            total_w += bi;
        }
    }
    if (ratio_weight.empty())
        throw std::invalid_argument("optimal_lambda: B is identically zero on the domain");

    std::sort(ratio_weight.begin(), ratio_weight.end());
    double acc = 0.0;
    for (const auto& [r, w] : ratio_weight) {
        acc += w;
        if (acc >= 0.5 * total_w) return r;
    }
    return ratio_weight.back().first;
}

double postproc_objective(const Volume& a, const Volume& b, double lambda,
                          const Mask* domain) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (domain && !domain->data[i]) continue;
        sum += std::abs(static_cast<double>(a.data[i]) - lambda * b.data[i]);
        ++n;
    }
    if (n == 0) throw std::invalid_argument("postproc_objective: empty domain");
    return sum / static_cast<double>(n);
}

std::vector<double> log_spaced_sigmas(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    return out;
}

PostprocParams optimize_params(const ScoreVolume& sv, const std::vector<double>& sigma_grid,
                               const Mask* domain) {
    if (sigma_grid.empty()) throw std::invalid_argument("optimize_params: empty sigma grid");
    std::vector<double> sigmas = sigma_grid;
    std::sort(sigmas.begin(), sigmas.end());

    const Volume grad = gradient_l1(sv.reconstruction);

    PostprocParams best;
    double best_obj = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double sigma : sigmas) {
        const Volume b = gaussian_blur3d(grad, sigma);
        const double lambda = optimal_lambda(sv.score, b, domain);
        const double obj = postproc_objective(sv.score, b, lambda, domain);
        if (obj < best_obj) { // strict: ties keep the smaller sigma
            best_obj = obj;
            best = {lambda, sigma};
            found = true;
        }
    }
    if (!found) throw std::runtime_error("optimize_params: no valid sigma");
    return best;
}

} // namespace porovox
