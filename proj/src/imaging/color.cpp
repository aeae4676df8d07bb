#include "invizo/imaging/color.hpp"

#include <cmath>

namespace invizo {

RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels() == 1) return img;
  RasterImage out(img.width(), img.height(), 1);
  const auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    // Integer weights over 1000 keep rounding exact: 299 + 587 + 114 = 1000.
    const int luma = 299 * src[3 * i] + 587 * src[3 * i + 1] + 114 * src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>((luma + 500) / 1000);
  }
  return out;
}

RasterImage gray_to_rgb(const RasterImage& gray) {
  if (gray.channels() == 3) return gray;
  RasterImage out(gray.width(), gray.height(), 3);
  const auto src = gray.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  return out;
}

}  // namespace invizo
