#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "invizo/imaging/raster.hpp"

namespace invizo {

// PNG (8-bit gray/RGB; palette, alpha and 16-bit inputs are converted) and
// binary PGM (P5, maxval 255).
RasterImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RasterImage& img);

RasterImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const RasterImage& img);

// Dispatches on the file signature.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

RasterImage read_image(const std::filesystem::path& path);
// Format picked from the extension (.pgm writes P5, anything else PNG).
void write_image(const std::filesystem::path& path, const RasterImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace invizo
