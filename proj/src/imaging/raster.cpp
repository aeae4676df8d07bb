#include "invizo/imaging/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invizo/core/error.hpp"

namespace invizo {

RasterImage::RasterImage(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  require(width >= 1 && height >= 1, "image dimensions must be positive");
  require(channels == 1 || channels == 3, "image must have 1 or 3 channels");
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  require(width >= 1 && height >= 1, "image dimensions must be positive");
  require(channels == 1 || channels == 3, "image must have 1 or 3 channels");
  require(data_.size() == static_cast<std::size_t>(width) * height * channels,
          "pixel buffer size does not match " + std::to_string(width) + "x" +
              std::to_string(height) + "x" + std::to_string(channels));
}

FloatImage to_float(const RasterImage& gray) {
  require(gray.channels() == 1, "to_float expects a single-channel image");
  FloatImage out(gray.width(), gray.height());
  const auto src = gray.data();
  for (std::size_t i = 0; i < src.size(); ++i) out.data[i] = src[i] / 255.0f;
  return out;
}

RasterImage to_raster(const FloatImage& plane) {
  RasterImage out(plane.width, plane.height, 1);
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const float v = std::clamp(std::nearbyint(plane.data[i] * 255.0f), 0.0f, 255.0f);
    dst[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

RasterImage invert(const RasterImage& img) {
  RasterImage out = img;
  for (auto& v : out.data()) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

RasterImage crop(const RasterImage& img, int x0, int y0, int w, int h, std::uint8_t fill) {
  RasterImage out(w, h, img.channels(), fill);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (img.contains(x0 + x, y0 + y))
        for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
  return out;
}

}  // namespace invizo
