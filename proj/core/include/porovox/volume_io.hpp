#pragma once

#include <string>

#include "porovox/volume.hpp"

namespace porovox {

// On-disk format: <name>.json header + <name>.raw payload.
// Header fields: dims, spacing_um, dtype ("f32" or "u8"), order ("xyz"),
// data_file. Payload is little-endian, x-fastest.

Volume load_volume(const std::string& path);
void save_volume(const Volume& v, const std::string& path);

Mask load_mask(const std::string& path);
void save_mask(const Mask& m, const std::string& path);

} // namespace porovox
