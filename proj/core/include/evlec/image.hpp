#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace evlec {

// 8-bit grayscale raster, row-major. Doubles as the intensity-frame type.
struct image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // width*height, y-major

    image8() = default;
    image8(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    bool same_shape(const image8& other) const {
        return width == other.width && height == other.height;
    }
};

// Binary PGM (P5), 8-bit only.
image8 read_pgm(const std::filesystem::path& path);
image8 read_pgm(std::istream& in, const std::string& name);
void write_pgm(const image8& img, const std::filesystem::path& path);

} // namespace evlec
