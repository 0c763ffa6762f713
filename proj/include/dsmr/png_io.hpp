#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dsmr {

// Minimal PNG writer (8-bit grayscale or RGB, zlib-compressed, filter 0).
// pixels is row-major, top row first; channels is 1 or 3.
void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<uint8_t>& pixels);

} // namespace dsmr
