#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace invizo {

// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels, row-major.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, std::uint8_t fill = 0);
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return std::span(data_).subspan(index(0, y, 0), static_cast<std::size_t>(width_) * channels_);
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

// Single-channel float plane used for intermediate results (scale space,
// resampling) where 8-bit rounding would lose information.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  FloatImage() = default;
  FloatImage(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Gray intensities scaled to [0, 1].
FloatImage to_float(const RasterImage& gray);
// Rounds and clamps to [0, 255].
RasterImage to_raster(const FloatImage& plane);

RasterImage invert(const RasterImage& img);

// Copies the rectangle [x0, x0+w) x [y0, y0+h); samples outside the source
// read as `fill`.
RasterImage crop(const RasterImage& img, int x0, int y0, int w, int h, std::uint8_t fill = 255);

}  // namespace invizo
