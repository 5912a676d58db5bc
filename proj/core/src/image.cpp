#include "ncvar/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ncvar/common.hpp"

namespace ncvar {

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
    if (int(pixels.size()) != width * height)
        throw ValidationError("pixel buffer does not match the image size");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "P2\n" << width << ' ' << height << "\n255\n";
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (c) out << ' ';
            out << int(pixels[std::size_t(r) * std::size_t(width) + std::size_t(c)]);
        }
        out << '\n';
    }
}

void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::array<std::uint8_t, 3>>& pixels) {
    if (int(pixels.size()) != width * height)
        throw ValidationError("pixel buffer does not match the image size");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "P3\n" << width << ' ' << height << "\n255\n";
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const auto& px = pixels[std::size_t(r) * std::size_t(width) + std::size_t(c)];
            if (c) out << ' ';
            out << int(px[0]) << ' ' << int(px[1]) << ' ' << int(px[2]);
        }
        out << '\n';
    }
}

std::vector<std::uint8_t> normalize_to_gray(const std::vector<double>& values) {
    std::vector<std::uint8_t> gray(values.size(), 0);
    if (values.empty()) return gray;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    if (range <= 0.0) return gray;
    for (std::size_t i = 0; i < values.size(); ++i)
        gray[i] = std::uint8_t(std::lround(255.0 * (values[i] - *lo) / range));
    return gray;
}

} // namespace ncvar
