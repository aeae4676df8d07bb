#pragma once

#include <array>
#include <cstdint>

#include "invizo/imaging/raster.hpp"

namespace invizo {

// Row-major 3x3 projective matrix acting on (x, y, 1).
using Mat3 = std::array<double, 9>;

inline constexpr Mat3 kIdentity3 = {1, 0, 0, 0, 1, 0, 0, 0, 1};

// Area averaging along axes that shrink, bilinear (pixel-centre aligned)
// along axes that grow.
RasterImage resize(const RasterImage& img, int width, int height);

// Bilinear sample where integer (x, y) is the centre of pixel (x, y); samples outside the image
// read as `fill`.
double sample_bilinear(const RasterImage& img, double x, double y, int channel, double fill);

// out(x, y) = src(inverse * (x, y, 1)), bilinear; points mapping outside the
// source (or to infinity) read as `fill`.
RasterImage warp_perspective(const RasterImage& src, const Mat3& inverse, int out_width,
                             int out_height, std::uint8_t fill = 255);

// Nearest-neighbour variant used where interpolation must not blend labels.
RasterImage warp_nearest(const RasterImage& src, const Mat3& inverse, int out_width,
                         int out_height, std::uint8_t fill = 255);

}  // namespace invizo

namespace invizo {

// Scales to `height` preserving aspect. Narrower results are padded on the
// left with white; wider ones are scaled down to `width` and centred
// vertically on a white canvas.
RasterImage fit_line_canvas(const RasterImage& img, int width, int height);

}  // namespace invizo
