#include "porovox/phantom.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "porovox/filters.hpp"

namespace porovox {

namespace {

struct SolidGeom {
    double cx, cy;
    double radius;      // cylinder only
    int lo[3], hi[3];   // inclusive bounds of the solid's bounding region
};

SolidGeom solid_geometry(const PhantomSpec& spec) {
    SolidGeom g{};
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    g.cx = (nx - 1) / 2.0;
    g.cy = (ny - 1) / 2.0;
    if (spec.shape == PhantomShape::Cylinder) {
        g.radius = 0.42 * std::min(nx, ny);
        const int mz = std::max(2, nz / 16);
        g.lo[0] = 0; g.hi[0] = nx - 1;
        g.lo[1] = 0; g.hi[1] = ny - 1;
        g.lo[2] = mz; g.hi[2] = nz - 1 - mz;
    } else {
        for (int a = 0; a < 3; ++a) {
            const int m = std::max(2, spec.dims[a] / 10);
            g.lo[a] = m;
            g.hi[a] = spec.dims[a] - 1 - m;
        }
    }
    return g;
}

bool in_solid(const PhantomSpec& spec, const SolidGeom& g, int x, int y, int z) {
    if (z < g.lo[2] || z > g.hi[2]) return false;
    if (spec.shape == PhantomShape::Cylinder) {
        const double dx = x - g.cx, dy = y - g.cy;
        return dx * dx + dy * dy <= g.radius * g.radius;
    }
    return x >= g.lo[0] && x <= g.hi[0] && y >= g.lo[1] && y <= g.hi[1];
}

bool in_ellipsoid(const PhantomPore& p, int x, int y, int z) {
    const double dx = (x - p.center[0]) / p.radii[0];
    const double dy = (y - p.center[1]) / p.radii[1];
    const double dz = (z - p.center[2]) / p.radii[2];
    return dx * dx + dy * dy + dz * dz <= 1.0;
}

// The pore, inflated by one voxel, must lie in the solid.
bool pore_inside_solid(const PhantomSpec& spec, const SolidGeom& g, const PhantomPore& p) {
    for (int a = 0; a < 3; ++a)
        if (p.radii[a] < 0.5) return false;
    const int margin = 1;
    for (int a = 0; a < 3; ++a) {
        const int lo = static_cast<int>(std::floor(p.center[a] - p.radii[a])) - margin;
        const int hi = static_cast<int>(std::ceil(p.center[a] + p.radii[a])) + margin;
        if (lo < 0 || hi >= spec.dims[a]) return false;
    }
    const int lo[3] = {static_cast<int>(std::floor(p.center[0] - p.radii[0])) - margin,
                       static_cast<int>(std::floor(p.center[1] - p.radii[1])) - margin,
                       static_cast<int>(std::floor(p.center[2] - p.radii[2])) - margin};
    const int hi[3] = {static_cast<int>(std::ceil(p.center[0] + p.radii[0])) + margin,
                       static_cast<int>(std::ceil(p.center[1] + p.radii[1])) + margin,
                       static_cast<int>(std::ceil(p.center[2] + p.radii[2])) + margin};
    for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
            for (int x = lo[0]; x <= hi[0]; ++x)
                if (!in_solid(spec, g, x, y, z)) return false;
    return true;
}

} // namespace

bool phantom_solid_contains(const PhantomSpec& spec, int x, int y, int z) {
    const SolidGeom g = solid_geometry(spec);
    return in_solid(spec, g, x, y, z);
}

std::pair<Volume, Mask> generate_phantom(const PhantomSpec& spec) {
    if (spec.material <= spec.background)
        throw std::invalid_argument("generate_phantom: material must exceed background");
    const SolidGeom g = solid_geometry(spec);
    for (const auto& p : spec.pores)
        if (!pore_inside_solid(spec, g, p))
            throw std::invalid_argument("generate_phantom: pore not strictly inside solid");

    Volume v(spec.dims, spec.background);
    Mask gt(spec.dims, 0);

    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x)
                if (in_solid(spec, g, x, y, z)) v.at(x, y, z) = spec.material;

    for (const auto& p : spec.pores) {
        const int lo[3] = {static_cast<int>(std::floor(p.center[0] - p.radii[0])),
                           static_cast<int>(std::floor(p.center[1] - p.radii[1])),
                           static_cast<int>(std::floor(p.center[2] - p.radii[2]))};
        const int hi[3] = {static_cast<int>(std::ceil(p.center[0] + p.radii[0])),
                           static_cast<int>(std::ceil(p.center[1] + p.radii[1])),
                           static_cast<int>(std::ceil(p.center[2] + p.radii[2]))};
        for (int z = lo[2]; z <= hi[2]; ++z)
            for (int y = lo[1]; y <= hi[1]; ++y)
                for (int x = lo[0]; x <= hi[0]; ++x)
                    if (in_ellipsoid(p, x, y, z)) {
                        v.at(x, y, z) = spec.background;
                        gt.at(x, y, z) = 1;
                    }
    }

    if (spec.blur_sigma > 0.0) v = gaussian_blur3d(v, spec.blur_sigma);

    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (float& x : v.data) x = static_cast<float>(x + noise(rng));
    }
    return {std::move(v), std::move(gt)};
}

std::vector<PhantomPore> random_pores(const PhantomSpec& spec, int n_pores, double r_min,
                                      double r_max, std::uint64_t seed) {
    const SolidGeom g = solid_geometry(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(r_min, r_max);
    std::uniform_real_distribution<double> ux(0.0, spec.dims[0] - 1.0);
    std::uniform_real_distribution<double> uy(0.0, spec.dims[1] - 1.0);
    std::uniform_real_distribution<double> uz(0.0, spec.dims[2] - 1.0);

    std::vector<PhantomPore> out;
    int attempts = 0;
    const int max_attempts = 200000;
    while (static_cast<int>(out.size()) < n_pores && attempts++ < max_attempts) {
        PhantomPore p;
        p.center = {ux(rng), uy(rng), uz(rng)};
        p.radii = {ur(rng), ur(rng), ur(rng)};
        if (!pore_inside_solid(spec, g, p)) continue;
        const double pr = std::max({p.radii[0], p.radii[1], p.radii[2]});
        bool clash = false;
        for (const auto& q : out) {
            const double qr = std::max({q.radii[0], q.radii[1], q.radii[2]});
            double d2 = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double d = p.center[a] - q.center[a];
                d2 += d * d;
            }
            const double min_sep = pr + qr + 4.0; // keep components well separated
            if (d2 < min_sep * min_sep) { clash = true; break; }
        }
        if (!clash) out.push_back(p);
    }
    if (static_cast<int>(out.size()) < n_pores)
        throw std::runtime_error("random_pores: could not place requested pore count");
    return out;
}

} // namespace porovox
