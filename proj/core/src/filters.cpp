#include "porovox/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace porovox {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + r];
    }
    for (double& w : k) w /= sum;
    return k;
}

// One separable pass along `axis` with replicate border.
void blur_axis(const Volume& src, Volume& dst, const std::vector<double>& kernel, int axis) {
    const int r = static_cast<int>(kernel.size() / 2);
    const int nx = src.dims[0], ny = src.dims[1], nz = src.dims[2];
    const int len = src.dims[axis];
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                double acc = 0.0;
                int pos[3] = {x, y, z};
                for (int i = -r; i <= r; ++i) {
                    int p[3] = {pos[0], pos[1], pos[2]};
                    p[axis] = std::clamp(pos[axis] + i, 0, len - 1);
                    acc += kernel[i + r] * src.at(p[0], p[1], p[2]);
                }
                dst.at(x, y, z) = static_cast<float>(acc);
            }
}

} // namespace

Volume gaussian_blur3d(const Volume& v, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur3d: negative sigma");
    if (sigma == 0.0) return v;
    const auto kernel = gaussian_kernel(sigma);
    Volume a = v, b = v;
    blur_axis(a, b, kernel, 0);
    blur_axis(b, a, kernel, 1);
    blur_axis(a, b, kernel, 2);
    return b;
}

Volume gradient_l1(const Volume& v) {
    for (int a = 0; a < 3; ++a)
        if (v.dims[a] < 2)
            throw std::invalid_argument("gradient_l1: every axis must have length >= 2");

    Volume out(v.dims, 0.0f, v.spacing);
    const int nx = v.dims[0], ny = v.dims[1], nz = v.dims[2];

    auto diff1d = [](float lo, float hi, bool onesided) {
        return onesided ? static_cast<double>(hi) - lo : 0.5 * (static_cast<double>(hi) - lo);
    };

    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const double dx = diff1d(v.at(std::max(x - 1, 0), y, z),
                                         v.at(std::min(x + 1, nx - 1), y, z),
                                         x == 0 || x == nx - 1);
                const double dy = diff1d(v.at(x, std::max(y - 1, 0), z),
                                         v.at(x, std::min(y + 1, ny - 1), z),
                                         y == 0 || y == ny - 1);
                const double dz = diff1d(v.at(x, y, std::max(z - 1, 0)),
                                         v.at(x, y, std::min(z + 1, nz - 1)),
                                         z == 0 || z == nz - 1);
                out.at(x, y, z) =
                    static_cast<float>(std::abs(dx) + std::abs(dy) + std::abs(dz));
            }
    return out;
}

} // namespace porovox
