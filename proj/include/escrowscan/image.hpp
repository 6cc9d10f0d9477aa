#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace escrowscan {

// Decoded raster, 8-bit RGB interleaved, row-major.
struct DecodedImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; // size = 3 * width * height

    std::uint8_t r(int x, int y) const { return rgb[3 * (std::size_t(y) * width + x)]; }
    std::uint8_t g(int x, int y) const { return rgb[3 * (std::size_t(y) * width + x) + 1]; }
    std::uint8_t b(int x, int y) const { return rgb[3 * (std::size_t(y) * width + x) + 2]; }
};

// Decodes any format the imaging backend understands (png/jpg/gif/bmp/...).
// Returns nullopt on undecodable input.
std::optional<DecodedImage> decode_image(const std::vector<std::uint8_t>& bytes);

// Lossless PNG encoding, used by the synthetic corpus generator.
std::vector<std::uint8_t> encode_png(const DecodedImage& img);

} // namespace escrowscan
