#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ncvar {

/// Plain ASCII PGM (P2), maxval 255, row-major pixels.
void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);

/// Plain ASCII PPM (P3), maxval 255, row-major RGB triples.
void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::array<std::uint8_t, 3>>& pixels);

/// Maps values to 0..255 with round(255 * (v - min) / (max - min)); a flat
/// range maps everything to 0.
std::vector<std::uint8_t> normalize_to_gray(const std::vector<double>& values);

} // namespace ncvar
