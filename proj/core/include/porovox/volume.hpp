#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace porovox {

/// Dense 3D scalar grid, x-fastest storage order. Spacing is metadata only
/// (micrometres per voxel, isotropic 10 um by default).
struct Volume {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{10.0, 10.0, 10.0};
    std::vector<float> data;

    Volume() = default;
    Volume(std::array<int, 3> d, float fill = 0.0f,
           std::array<double, 3> sp = {10.0, 10.0, 10.0});

    std::size_t size() const { return data.size(); }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }

    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }

    /// Sample with coordinates clamped to the grid (replicate border).
    float at_clamped(int x, int y, int z) const;

    bool same_grid(const Volume& o) const { return dims == o.dims; }
};

/// Binary voxel mask on the same grid layout as Volume.
struct Mask {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{10.0, 10.0, 10.0};
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(std::array<int, 3> d, std::uint8_t fill = 0,
         std::array<double, 3> sp = {10.0, 10.0, 10.0});

    std::size_t size() const { return data.size(); }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }
    std::uint8_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
    std::uint8_t& at(int x, int y, int z) { return data[index(x, y, z)]; }

    std::size_t count() const;
};

struct Histogram {
    std::vector<double> bin_edges;     // n+1 monotone edges
    std::vector<std::uint64_t> counts; // n bins
    bool degenerate = false;           // constant input, single catch-all bin
};

/// Equal-width histogram over [min(v), max(v)]; every voxel counted once.
/// A constant volume yields a single flagged degenerate bin.
Histogram histogram(const Volume& v, int n_bins);

} // namespace porovox
