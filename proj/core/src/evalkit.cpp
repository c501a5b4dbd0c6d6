#include "porovox/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace porovox {

SoftCounts soft_counts(const Volume& pred, const Mask& target) {
    if (pred.dims != target.dims) throw std::invalid_argument("soft_counts: dims mismatch");
    SoftCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.data[i];
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("soft_counts: prediction outside [0,1]");
        const double t = target.data[i] ? 1.0 : 0.0;
        c.tp += p * t;
        c.fn += (1.0 - p) * t;
        c.fp += p * (1.0 - t);
    }
    return c;
}

double focal_tversky_loss(const SoftCounts& c, const FTLParams& p) {
    if (p.alpha <= 0.0 || p.beta <= 0.0 || p.gamma <= 0.0)
        throw std::invalid_argument("focal_tversky_loss: parameters must be positive");
    const double index = (c.tp + p.smooth) /
                         (c.tp + p.alpha * c.fn + p.beta * c.fp + p.smooth);
    return std::pow(1.0 - index, p.gamma);
}

double focal_tversky_loss(const Volume& pred, const Mask& target, const FTLParams& p) {
    return focal_tversky_loss(soft_counts(pred, target), p);
}

double dice_score(const Mask& pred, const Mask& target) {
    if (pred.dims != target.dims) throw std::invalid_argument("dice_score: dims mismatch");
    std::size_t tp = 0, fn = 0, fp = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool pi = pred.data[i] != 0, ti = target.data[i] != 0;
        tp += pi && ti;
        fn += !pi && ti;
        fp += pi && !ti;
    }
    if (tp + fn + fp == 0) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fn + fp);
}

double deep_supervision_combine(const std::vector<double>& stage_losses) {
    if (stage_losses.empty())
        throw std::invalid_argument("deep_supervision_combine: no stages");
    double num = 0.0, den = 0.0, w = 1.0;
    for (double l : stage_losses) {
        num += w * l;
        den += w;
        w *= 0.5;
    }
    return num / den;
}

namespace {

struct Group {
    double score;
    std::size_t pos, neg;
};

// Descending score order, equal scores merged.
std::vector<Group> tie_groups(const std::vector<double>& scores,
                              const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("curves: scores/labels size mismatch");
    if (scores.empty()) throw std::invalid_argument("curves: empty input");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });
    std::vector<Group> groups;
    for (std::size_t i : order) {
        if (groups.empty() || groups.back().score != scores[i])
            groups.push_back({scores[i], 0, 0});
        if (labels[i])
            ++groups.back().pos;
        else
            ++groups.back().neg;
    }
    return groups;
}

} // namespace

EvalCurves roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const auto groups = tie_groups(scores, labels);
    std::size_t total_pos = 0, total_neg = 0;
    for (const auto& g : groups) {
        total_pos += g.pos;
        total_neg += g.neg;
    }
    if (total_pos == 0 || total_neg == 0)
        throw std::invalid_argument("roc_auc: both classes required");

    EvalCurves out;
    out.roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    double tp = 0.0, fp = 0.0, auc = 0.0;
    for (const auto& g : groups) {
        const double prev_fpr = fp / total_neg, prev_tpr = tp / total_pos;
        tp += static_cast<double>(g.pos);
        fp += static_cast<double>(g.neg);
        const double fpr = fp / total_neg, tpr = tp / total_pos;
        auc += (fpr - prev_fpr) * 0.5 * (tpr + prev_tpr);
        out.roc.push_back({fpr, tpr, g.score});
    }
    out.auc = auc;
    return out;
}

EvalCurves pr_ap(const std::vector<double>& scores, const std::vector<int>& labels) {
    const auto groups = tie_groups(scores, labels);
    std::size_t total_pos = 0;
    for (const auto& g : groups) total_pos += g.pos;
    if (total_pos == 0) throw std::invalid_argument("pr_ap: no positives");

    EvalCurves out;
    double tp = 0.0, seen = 0.0, ap = 0.0;
    for (const auto& g : groups) {
        tp += static_cast<double>(g.pos);
        seen += static_cast<double>(g.pos + g.neg);
        const double precision = tp / seen;
        const double recall = tp / static_cast<double>(total_pos);
        // Every positive in a tied group receives the group-end precision.
        ap += static_cast<double>(g.pos) * precision;
        out.pr.push_back({recall, precision, g.score});
    }
    out.ap = ap / static_cast<double>(total_pos);
    return out;
}

EvalCurves evaluate_curves(const std::vector<double>& scores,
                           const std::vector<int>& labels) {
    EvalCurves roc = roc_auc(scores, labels);
    EvalCurves pr = pr_ap(scores, labels);
    roc.pr = std::move(pr.pr);
    roc.ap = pr.ap;
    return roc;
}

WelchResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    const auto na = a.size(), nb = b.size();
    if (na < 2 || nb < 2) throw std::invalid_argument("welch_ttest: need n >= 2 per sample");
    auto mean_var = [](const std::vector<double>& s) {
        const double m = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
        double v = 0.0;
        for (double x : s) v += (x - m) * (x - m);
        return std::pair<double, double>{m, v / (s.size() - 1)};
    };
    const auto [ma, va] = mean_var(a);
    const auto [mb, vb] = mean_var(b);
    if (va == 0.0 && vb == 0.0) {
        if (ma == mb) return {0.0, static_cast<double>(na + nb - 2), 1.0};
        throw std::invalid_argument("welch_ttest: both samples degenerate");
    }
    const double sa = va / na, sb = vb / nb;
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) /
           (sa * sa / (na - 1) + sb * sb / (nb - 1));
    boost::math::students_t dist(r.df);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    return r;
}

FoldSummary summarize_folds(const std::vector<double>& values) {
    const auto n = values.size();
    if (n < 2) throw std::invalid_argument("summarize_folds: need at least 2 folds");
    FoldSummary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    var /= (n - 1);
    s.stderr_of_mean = std::sqrt(var / n);
    return s;
}

void flatten_for_eval(const Volume& scores, const Mask& labels, const Mask* domain,
                      std::vector<double>& out_scores, std::vector<int>& out_labels,
                      std::size_t max_voxels, std::uint64_t seed) {
    if (scores.dims != labels.dims)
        throw std::invalid_argument("flatten_for_eval: dims mismatch");
    out_scores.clear();
    out_labels.clear();

    std::size_t n = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!domain || domain->data[i]) ++n;

    if (n <= max_voxels) {
        out_scores.reserve(n);
        out_labels.reserve(n);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (domain && !domain->data[i]) continue;
            out_scores.push_back(scores.data[i]);
            out_labels.push_back(labels.data[i] ? 1 : 0);
        }
        return;
    }

    // Seeded uniform subsampling keeps curve estimation tractable.
    std::mt19937_64 rng(seed);
    const double keep = static_cast<double>(max_voxels) / static_cast<double>(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (domain && !domain->data[i]) continue;
        if (u(rng) > keep) continue;
        out_scores.push_back(scores.data[i]);
        out_labels.push_back(labels.data[i] ? 1 : 0);
    }
}

} // namespace porovox
