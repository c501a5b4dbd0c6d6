#include "porovox/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fftw3.h>

namespace porovox {

std::vector<double> subsampled_angles(int base_angles, double fraction) {
    if (base_angles < 2) throw std::invalid_argument("subsampled_angles: base_angles < 2");
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("subsampled_angles: fraction must be in (0,1]");
    const int m = static_cast<int>(std::ceil(fraction * base_angles));
    std::vector<double> angles(m);
    for (int i = 0; i < m; ++i) angles[i] = std::numbers::pi * i / m;
    return angles;
}

namespace {

double sample_bilinear(const std::vector<float>& slice, int n, double x, double y) {
    if (x < -1.0 || y < -1.0 || x > n || y > n) return 0.0;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0, fy = y - y0;
    auto px = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= n || yi >= n) return 0.0;
        return slice[static_cast<std::size_t>(xi) + static_cast<std::size_t>(n) * yi];
    };
    return (1 - fx) * (1 - fy) * px(x0, y0) + fx * (1 - fy) * px(x0 + 1, y0) +
           (1 - fx) * fy * px(x0, y0 + 1) + fx * fy * px(x0 + 1, y0 + 1);
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace

Sinogram radon2d(const std::vector<float>& slice, int n, const std::vector<double>& angles) {
    if (static_cast<std::size_t>(n) * n != slice.size())
        throw std::invalid_argument("radon2d: slice must be square n*n");
    Sinogram s;
    s.angles = angles;
    s.detector_bins = n;
    s.values.assign(angles.size() * n, 0.0);

    const double c = (n - 1) / 2.0;
    const int smax = static_cast<int>(std::ceil(0.75 * n)) + 1;

    for (std::size_t ai = 0; ai < angles.size(); ++ai) {
        const double ct = std::cos(angles[ai]), st = std::sin(angles[ai]);
        for (int bin = 0; bin < n; ++bin) {
            const double u = bin - c;
            double acc = 0.0;
            for (int si = -smax; si <= smax; ++si) {
                const double x = c + u * ct - si * st;
                const double y = c + u * st + si * ct;
                acc += sample_bilinear(slice, n, x, y);
            }
            s.at(ai, bin) = acc; // step length = 1 voxel
        }
    }
    return s;
}

std::vector<float> fbp2d(const Sinogram& s, int n) {
    if (s.angles.size() < 2) throw std::invalid_argument("fbp2d: need at least 2 angles");
    if (s.detector_bins != n) throw std::invalid_argument("fbp2d: detector/output size mismatch");

    const int m = next_pow2(2 * n);
    std::vector<double> padded(m);
    std::vector<fftw_complex> freq(m / 2 + 1);
    std::vector<double> ramp(m / 2 + 1);
    for (int k = 0; k <= m / 2; ++k) ramp[k] = 2.0 * k / m; // 2*|fftfreq|

    fftw_plan fwd = fftw_plan_dft_r2c_1d(m, padded.data(), freq.data(), FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_c2r_1d(m, freq.data(), padded.data(), FFTW_ESTIMATE);

    std::vector<double> filtered(s.angles.size() * n);
    for (std::size_t ai = 0; ai < s.angles.size(); ++ai) {
        std::fill(padded.begin(), padded.end(), 0.0);
        for (int b = 0; b < n; ++b) padded[b] = s.at(ai, b);
        fftw_execute(fwd);
        for (int k = 0; k <= m / 2; ++k) {
            freq[k][0] *= ramp[k];
            freq[k][1] *= ramp[k];
        }
        fftw_execute(bwd);
        for (int b = 0; b < n; ++b) filtered[ai * n + b] = padded[b] / m;
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);

    std::vector<float> out(static_cast<std::size_t>(n) * n, 0.0f);
    const double c = (n - 1) / 2.0;
    const double scale = std::numbers::pi / (2.0 * static_cast<double>(s.angles.size()));
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double dx = x - c, dy = y - c;
            if (dx * dx + dy * dy > c * c) continue; // reconstruction circle
            double acc = 0.0;
            for (std::size_t ai = 0; ai < s.angles.size(); ++ai) {
                const double t = c + dx * std::cos(s.angles[ai]) + dy * std::sin(s.angles[ai]);
                const int t0 = static_cast<int>(std::floor(t));
                const double ft = t - t0;
                const double v0 = (t0 >= 0 && t0 < n) ? filtered[ai * n + t0] : 0.0;
                const double v1 = (t0 + 1 >= 0 && t0 + 1 < n) ? filtered[ai * n + t0 + 1] : 0.0;
                acc += (1 - ft) * v0 + ft * v1;
            }
            out[static_cast<std::size_t>(x) + static_cast<std::size_t>(n) * y] =
                static_cast<float>(acc * scale);
        }
    return out;
}

void apply_transmission_noise(Sinogram& s, double exposure_fraction,
                              double incident_intensity, std::uint64_t seed) {
    if (exposure_fraction <= 0.0 || exposure_fraction > 1.0)
        throw std::invalid_argument("apply_transmission_noise: exposure in (0,1] required");
    if (incident_intensity <= 0.0)
        throw std::invalid_argument("apply_transmission_noise: I0 must be positive");
    std::mt19937_64 rng(seed);
    const double i0 = exposure_fraction * incident_intensity;
    for (double& p : s.values) {
        const double expected = i0 * std::exp(-p);
        std::poisson_distribution<long long> poisson(expected);
        const double counts = std::max<long long>(poisson(rng), 1); // photon-starvation guard
        p = -std::log(counts / i0);
    }
}

Volume degrade_volume(const Volume& v, const DegradeSpec& spec) {
    if (v.dims[0] != v.dims[1])
        throw std::invalid_argument("degrade_volume: slices must be square (dims x == y)");
    const int n = v.dims[0];
    const auto angles = subsampled_angles(spec.base_angles, spec.projection_fraction);

    Volume out(v.dims, 0.0f, v.spacing);
    std::vector<float> slice(static_cast<std::size_t>(n) * n);
    for (int z = 0; z < v.dims[2]; ++z) {
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                slice[static_cast<std::size_t>(x) + static_cast<std::size_t>(n) * y] =
                    v.at(x, y, z);
        Sinogram s = radon2d(slice, n, angles);
        if (spec.noise_enabled)
            apply_transmission_noise(s, spec.exposure_fraction, spec.incident_intensity,
                                     spec.seed ^ static_cast<std::uint64_t>(z));
        const auto rec = fbp2d(s, n);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                out.at(x, y, z) =
                    rec[static_cast<std::size_t>(x) + static_cast<std::size_t>(n) * y];
    }
    return out;
}

} // namespace porovox
