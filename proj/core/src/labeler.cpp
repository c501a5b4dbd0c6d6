#include "porovox/labeler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace porovox {

namespace {

Histogram histogram_of_values(const std::vector<float>& vals, int n_bins) {
    if (vals.empty()) throw std::invalid_argument("histogram: no values");
    const auto [mn_it, mx_it] = std::minmax_element(vals.begin(), vals.end());
    const double mn = *mn_it, mx = *mx_it;
    Histogram h;
    if (mn == mx) {
        h.bin_edges = {mn, mn};
        h.counts = {vals.size()};
        h.degenerate = true;
        return h;
    }
    h.bin_edges.resize(n_bins + 1);
    for (int i = 0; i <= n_bins; ++i) h.bin_edges[i] = mn + (mx - mn) * i / n_bins;
    h.counts.assign(n_bins, 0);
    const double scale = n_bins / (mx - mn);
    for (float x : vals) {
        int b = static_cast<int>((x - mn) * scale);
        ++h.counts[std::clamp(b, 0, n_bins - 1)];
    }
    return h;
}

} // namespace

std::array<double, 3> PoreComponent::centroid() const {
    std::array<double, 3> c{0, 0, 0};
    for (const auto& v : voxels)
        for (int a = 0; a < 3; ++a) c[a] += v[a];
    for (int a = 0; a < 3; ++a) c[a] /= static_cast<double>(voxels.size());
    return c;
}

double otsu_threshold(const Histogram& h) {
    if (h.degenerate) throw std::invalid_argument("otsu_threshold: degenerate histogram");
    const int n = static_cast<int>(h.counts.size());
    int nonempty = 0;
    for (auto c : h.counts)
        if (c > 0) ++nonempty;
    if (nonempty < 2) throw std::invalid_argument("otsu_threshold: fewer than 2 non-empty bins");

    double total = 0.0, total_mean = 0.0;
    std::vector<double> centers(n);
    for (int i = 0; i < n; ++i) {
        centers[i] = 0.5 * (h.bin_edges[i] + h.bin_edges[i + 1]);
        total += static_cast<double>(h.counts[i]);
        total_mean += centers[i] * static_cast<double>(h.counts[i]);
    }

    double best_var = -1.0, best_edge = h.bin_edges[1];
    double w0 = 0.0, sum0 = 0.0;
    for (int k = 1; k < n; ++k) {
        w0 += static_cast<double>(h.counts[k - 1]);
        sum0 += centers[k - 1] * static_cast<double>(h.counts[k - 1]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_mean - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_edge = h.bin_edges[k];
        }
    }
    return best_edge;
}

Mask object_mask(const Volume& v) {
    const double thr = otsu_threshold(histogram(v, 256));
    bool any_object = false;
    for (float x : v.data)
        if (x > thr) { any_object = true; break; }
    if (!any_object) throw std::runtime_error("object_mask: no voxel above threshold");

    const int nx = v.dims[0], ny = v.dims[1], nz = v.dims[2];
    std::vector<std::uint8_t> filled(v.size(), 0);
    std::vector<std::array<int, 3>> stack;

    auto push_if_bg = [&](int x, int y, int z) {
        const auto i = v.index(x, y, z);
        if (!filled[i] && v.data[i] <= thr) {
            filled[i] = 1;
            stack.push_back({x, y, z});
        }
    };

    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x)
                if (x == 0 || y == 0 || z == 0 || x == nx - 1 || y == ny - 1 || z == nz - 1)
                    push_if_bg(x, y, z);

    while (!stack.empty()) {
        const auto [x, y, z] = stack.back();
        stack.pop_back();
        if (x > 0) push_if_bg(x - 1, y, z);
        if (x < nx - 1) push_if_bg(x + 1, y, z);
        if (y > 0) push_if_bg(x, y - 1, z);
        if (y < ny - 1) push_if_bg(x, y + 1, z);
        if (z > 0) push_if_bg(x, y, z - 1);
        if (z < nz - 1) push_if_bg(x, y, z + 1);
    }

    Mask obj(v.dims, 0, v.spacing);
    for (std::size_t i = 0; i < v.size(); ++i) obj.data[i] = filled[i] ? 0 : 1;
    return obj;
}

Mask pore_mask_raw(const Volume& v, const Mask& obj) {
    if (v.dims != obj.dims) throw std::invalid_argument("pore_mask_raw: grid mismatch");
    std::vector<float> inside;
    inside.reserve(obj.count());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (obj.data[i]) inside.push_back(v.data[i]);
    if (inside.empty()) throw std::invalid_argument("pore_mask_raw: empty object mask");

    double thr = otsu_threshold(histogram_of_values(inside, 256));
    // Pores are void-intensity, so the pore cut can never sit above the
    // solid/background cut. Capping there keeps the second threshold from
    // latching onto partial-volume surface voxels (or the noise median on a
    // poreless solid), which would mark a shell of solid material as pores.
    const Histogram full = histogram(v, 256);
    if (!full.degenerate) thr = std::min(thr, otsu_threshold(full));

    Mask pores(v.dims, 0, v.spacing);
    for (std::size_t i = 0; i < v.size(); ++i)
        pores.data[i] = (obj.data[i] && v.data[i] < thr) ? 1 : 0;
    return pores;
}

std::vector<PoreComponent> connected_components(const Mask& mask) {
    const int nx = mask.dims[0], ny = mask.dims[1], nz = mask.dims[2];
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<PoreComponent> comps;
    std::vector<std::array<int, 3>> stack;

    for (int z0 = 0; z0 < nz; ++z0)
        for (int y0 = 0; y0 < ny; ++y0)
            for (int x0 = 0; x0 < nx; ++x0) {
                const auto i0 = mask.index(x0, y0, z0);
                if (!mask.data[i0] || seen[i0]) continue;

                PoreComponent c;
                c.bbox_min = {x0, y0, z0};
                c.bbox_max = {x0, y0, z0};
                seen[i0] = 1;
                stack.push_back({x0, y0, z0});
                while (!stack.empty()) {
                    const auto p = stack.back();
                    stack.pop_back();
                    c.voxels.push_back(p);
                    for (int a = 0; a < 3; ++a) {
                        c.bbox_min[a] = std::min(c.bbox_min[a], p[a]);
                        c.bbox_max[a] = std::max(c.bbox_max[a], p[a]);
                    }
                    static const int nbr[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                                  {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
                    for (const auto& d : nbr) {
                        const int x = p[0] + d[0], y = p[1] + d[1], z = p[2] + d[2];
                        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz)
                            continue;
                        const auto i = mask.index(x, y, z);
                        if (mask.data[i] && !seen[i]) {
                            seen[i] = 1;
                            stack.push_back({x, y, z});
                        }
                    }
                }
                std::sort(c.voxels.begin(), c.voxels.end());
                c.voxel_count = c.voxels.size();
                comps.push_back(std::move(c));
            }

    std::sort(comps.begin(), comps.end(), [](const PoreComponent& a, const PoreComponent& b) {
        return a.voxels.front() < b.voxels.front();
    });
    return comps;
}

std::vector<PoreComponent> filter_small_pores(std::vector<PoreComponent> comps, int min_dims) {
    std::erase_if(comps, [min_dims](const PoreComponent& c) {
        return c.extent(0) < min_dims || c.extent(1) < min_dims || c.extent(2) < min_dims;
    });
    return comps;
}

Mask components_to_mask(const std::vector<PoreComponent>& comps, std::array<int, 3> dims,
                        std::array<double, 3> spacing) {
    Mask m(dims, 0, spacing);
    for (const auto& c : comps)
        for (const auto& v : c.voxels) m.at(v[0], v[1], v[2]) = 1;
    return m;
}

PoreMask extract_pore_labels(const Volume& v, int min_dims) {
    const Mask obj = object_mask(v);
    const Mask raw = pore_mask_raw(v, obj);
    auto comps = filter_small_pores(connected_components(raw), min_dims);
    PoreMask out;
    out.mask = components_to_mask(comps, v.dims, v.spacing);
    out.components = std::move(comps);
    return out;
}

} // namespace porovox
