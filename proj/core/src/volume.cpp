#include "porovox/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace porovox {

Volume::Volume(std::array<int, 3> d, float fill, std::array<double, 3> sp)
    : dims(d), spacing(sp) {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] <= 0) throw std::invalid_argument("Volume: non-positive dimension");
        if (spacing[a] <= 0.0) throw std::invalid_argument("Volume: non-positive spacing");
    }
    data.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], fill);
}

float Volume::at_clamped(int x, int y, int z) const {
    x = std::clamp(x, 0, dims[0] - 1);
    y = std::clamp(y, 0, dims[1] - 1);
    z = std::clamp(z, 0, dims[2] - 1);
    return at(x, y, z);
}

Mask::Mask(std::array<int, 3> d, std::uint8_t fill, std::array<double, 3> sp)
    : dims(d), spacing(sp) {
    for (int a = 0; a < 3; ++a)
        if (dims[a] <= 0) throw std::invalid_argument("Mask: non-positive dimension");
    data.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], fill);
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(
        std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

Histogram histogram(const Volume& v, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("histogram: n_bins must be >= 2");
    if (v.data.empty()) throw std::invalid_argument("histogram: empty volume");

    const auto [mn_it, mx_it] = std::minmax_element(v.data.begin(), v.data.end());
    const double mn = *mn_it, mx = *mx_it;

    Histogram h;
    if (mn == mx) {
        h.bin_edges = {mn, mn};
        h.counts = {v.size()};
        h.degenerate = true;
        return h;
    }

    h.bin_edges.resize(n_bins + 1);
    for (int i = 0; i <= n_bins; ++i)
        h.bin_edges[i] = mn + (mx - mn) * i / n_bins;
    h.counts.assign(n_bins, 0);

    const double scale = n_bins / (mx - mn);
    for (float x : v.data) {
        int b = static_cast<int>((x - mn) * scale);
        b = std::clamp(b, 0, n_bins - 1);
        ++h.counts[b];
    }
    return h;
}

} // namespace porovox
