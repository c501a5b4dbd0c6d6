#include "porovox/patchflow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace porovox {

PatchGrid plan_patches(std::array<int, 3> dims, int patch_size, int stride) {
    if (stride < 0) stride = patch_size / 2;
    if (patch_size < 1) throw std::invalid_argument("plan_patches: patch_size < 1");
    if (stride < 1 || stride > patch_size)
        throw std::invalid_argument("plan_patches: stride must be in [1, patch_size]");

    PatchGrid g;
    g.dims = dims;
    g.patch_size = patch_size;
    g.stride = stride;

    std::array<int, 3> steps{};
    for (int a = 0; a < 3; ++a) {
        int padded = std::max(dims[a], patch_size);
        const int rem = (padded - patch_size) % stride;
        if (rem != 0) padded += stride - rem;
        g.padded_dims[a] = padded;
        steps[a] = (padded - patch_size) / stride + 1;
    }
    for (int z = 0; z < steps[2]; ++z)
        for (int y = 0; y < steps[1]; ++y)
            for (int x = 0; x < steps[0]; ++x)
                g.placements.push_back({x * stride, y * stride, z * stride});
    return g;
}

Volume extract_patch(const Volume& v, const PatchGrid& grid, std::size_t index) {
    if (v.dims != grid.dims) throw std::invalid_argument("extract_patch: grid mismatch");
    if (index >= grid.placements.size())
        throw std::out_of_range("extract_patch: placement index out of range");
    const auto o = grid.placements[index];
    const int n = grid.patch_size;
    Volume p({n, n, n}, 0.0f, v.spacing);
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                p.at(x, y, z) = v.at_clamped(o[0] + x, o[1] + y, o[2] + z);
    return p;
}

PatchAggregator::PatchAggregator(const PatchGrid& grid) : grid_(grid) {
    const auto n = static_cast<std::size_t>(grid.padded_dims[0]) * grid.padded_dims[1] *
                   grid.padded_dims[2];
    sum_.assign(n, 0.0);
    count_.assign(n, 0);
    added_.assign(grid.placements.size(), 0);
}

void PatchAggregator::add(std::size_t index, const Volume& patch) {
    if (index >= grid_.placements.size())
        throw std::out_of_range("PatchAggregator::add: index out of range");
    const int n = grid_.patch_size;
    if (patch.dims != std::array<int, 3>{n, n, n})
        throw std::invalid_argument("PatchAggregator::add: patch dims mismatch");
    if (added_[index]) throw std::logic_error("PatchAggregator::add: duplicate placement");
    added_[index] = 1;

    const auto o = grid_.placements[index];
    const auto px = static_cast<std::size_t>(grid_.padded_dims[0]);
    const auto py = static_cast<std::size_t>(grid_.padded_dims[1]);
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y) {
            std::size_t base = (o[0]) + px * ((o[1] + y) + py * (o[2] + z));
            for (int x = 0; x < n; ++x) {
                sum_[base + x] += patch.at(x, y, z);
                ++count_[base + x];
            }
        }
}

Volume PatchAggregator::finalize() const {
    for (std::size_t i = 0; i < added_.size(); ++i)
        if (!added_[i]) throw std::logic_error("PatchAggregator::finalize: missing patch");
    Volume out(grid_.dims);
    const auto px = static_cast<std::size_t>(grid_.padded_dims[0]);
    const auto py = static_cast<std::size_t>(grid_.padded_dims[1]);
    for (int z = 0; z < grid_.dims[2]; ++z)
        for (int y = 0; y < grid_.dims[1]; ++y)
            for (int x = 0; x < grid_.dims[0]; ++x) {
                const std::size_t i = x + px * (y + py * static_cast<std::size_t>(z));
                out.at(x, y, z) = static_cast<float>(sum_[i] / count_[i]);
            }
    return out;
}

Volume aggregate(const std::vector<Volume>& patches, const PatchGrid& grid) {
    if (patches.size() != grid.placements.size())
        throw std::invalid_argument("aggregate: need one patch per placement");
    PatchAggregator agg(grid);
    for (std::size_t i = 0; i < patches.size(); ++i) agg.add(i, patches[i]);
    return agg.finalize();
}

namespace {

float sample_trilinear(const Volume& v, double x, double y, double z) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int z0 = static_cast<int>(std::floor(z));
    const double fx = x - x0, fy = y - y0, fz = z - z0;
    double acc = 0.0;
    for (int dz = 0; dz <= 1; ++dz)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
                const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) * (dz ? fz : 1 - fz);
                acc += w * v.at_clamped(x0 + dx, y0 + dy, z0 + dz);
            }
    return static_cast<float>(acc);
}

std::uint8_t sample_nearest(const Mask& m, double x, double y, double z) {
    const int xi = std::clamp(static_cast<int>(std::lround(x)), 0, m.dims[0] - 1);
    const int yi = std::clamp(static_cast<int>(std::lround(y)), 0, m.dims[1] - 1);
    const int zi = std::clamp(static_cast<int>(std::lround(z)), 0, m.dims[2] - 1);
    return m.at(xi, yi, zi);
}

} // namespace

std::pair<Volume, Mask> augment(const Volume& image, const Mask& label,
                                const AugmentSpec& spec) {
    if (image.dims != label.dims) throw std::invalid_argument("augment: dims mismatch");
    if (spec.elastic_enabled &&
        spec.elastic_max_displacement >= spec.elastic_grid_spacing / 2.0)
        throw std::invalid_argument("augment: displacement must be < grid spacing / 2");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    bool flip[3];
    for (int a = 0; a < 3; ++a) flip[a] = u01(rng) < spec.flip_prob[a];

    Volume img = image;
    Mask lab = label;
    const int nx = image.dims[0], ny = image.dims[1], nz = image.dims[2];

    auto apply_flips = [&](auto& grid) {
        using V = std::remove_reference_t<decltype(grid)>;
        V out = grid;
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x)
                    out.at(x, y, z) = grid.at(flip[0] ? nx - 1 - x : x,
                                              flip[1] ? ny - 1 - y : y,
                                              flip[2] ? nz - 1 - z : z);
        grid = std::move(out);
    };
    if (flip[0] || flip[1] || flip[2]) {
        apply_flips(img);
        apply_flips(lab);
    }

    if (!spec.elastic_enabled) return {std::move(img), std::move(lab)};

    // Coarse control-point displacement grid, trilinearly upsampled.
    const int s = spec.elastic_grid_spacing;
    std::array<int, 3> cdims;
    for (int a = 0; a < 3; ++a) cdims[a] = image.dims[a] / s + 2;
    std::uniform_real_distribution<double> ud(-spec.elastic_max_displacement,
                                              spec.elastic_max_displacement);
    std::vector<std::array<double, 3>> ctrl(static_cast<std::size_t>(cdims[0]) * cdims[1] *
                                            cdims[2]);
    for (auto& d : ctrl) d = {ud(rng), ud(rng), ud(rng)};

    auto ctrl_at = [&](int cx, int cy, int cz) -> const std::array<double, 3>& {
        cx = std::clamp(cx, 0, cdims[0] - 1);
        cy = std::clamp(cy, 0, cdims[1] - 1);
        cz = std::clamp(cz, 0, cdims[2] - 1);
        return ctrl[cx + static_cast<std::size_t>(cdims[0]) *
                             (cy + static_cast<std::size_t>(cdims[1]) * cz)];
    };
    auto displacement = [&](int x, int y, int z) {
        const double gx = static_cast<double>(x) / s, gy = static_cast<double>(y) / s,
                     gz = static_cast<double>(z) / s;
        const int x0 = static_cast<int>(gx), y0 = static_cast<int>(gy),
                  z0 = static_cast<int>(gz);
        const double fx = gx - x0, fy = gy - y0, fz = gz - z0;
        std::array<double, 3> d{0, 0, 0};
        for (int dz = 0; dz <= 1; ++dz)
            for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx) {
                    const double w =
                        (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) * (dz ? fz : 1 - fz);
                    const auto& c = ctrl_at(x0 + dx, y0 + dy, z0 + dz);
                    for (int a = 0; a < 3; ++a) d[a] += w * c[a];
                }
        return d;
    };

    Volume wimg(image.dims, 0.0f, image.spacing);
    Mask wlab(label.dims, 0, label.spacing);
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const auto d = displacement(x, y, z);
                const double sx = x + d[0], sy = y + d[1], sz = z + d[2];
                wimg.at(x, y, z) = sample_trilinear(img, sx, sy, sz);
                wlab.at(x, y, z) = sample_nearest(lab, sx, sy, sz);
            }
    return {std::move(wimg), std::move(wlab)};
}

} // namespace porovox
