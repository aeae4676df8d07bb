#include "invizo/imaging/filter.hpp"

#include <algorithm>
#include <cmath>

#include "invizo/core/error.hpp"
#include "invizo/simd/kernels.hpp"

namespace invizo {

std::vector<float> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::Parameter, "gaussian sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += w[k + radius];
  }
  std::vector<float> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = static_cast<float>(w[i] / total);
  return out;
}

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

FloatImage convolve_separable(const FloatImage& plane, const std::vector<float>& row_kernel,
                              const std::vector<float>& col_kernel) {
  const int w = plane.width;
  const int h = plane.height;
  const int rr = static_cast<int>(row_kernel.size() / 2);
  const int cr = static_cast<int>(col_kernel.size() / 2);
  const auto& kt = simd::active();

  FloatImage tmp(w, h);
  std::vector<float> padded(w + 2 * rr);
  for (int y = 0; y < h; ++y) {
    const float* src = plane.data.data() + static_cast<std::size_t>(y) * w;
    for (int i = 0; i < w + 2 * rr; ++i) padded[i] = src[reflect_index(i - rr, w)];
    float* dst = tmp.data.data() + static_cast<std::size_t>(y) * w;
    for (std::size_t k = 0; k < row_kernel.size(); ++k)
      kt.axpy_f32(row_kernel[k], padded.data() + k, dst, w);
  }

  FloatImage out(w, h);
  for (int y = 0; y < h; ++y) {
    float* dst = out.data.data() + static_cast<std::size_t>(y) * w;
    for (std::size_t k = 0; k < col_kernel.size(); ++k) {
      const int sy = reflect_index(y + static_cast<int>(k) - cr, h);
      kt.axpy_f32(col_kernel[k], tmp.data.data() + static_cast<std::size_t>(sy) * w, dst, w);
    }
  }
  return out;
}

FloatImage gaussian_blur(const FloatImage& plane, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  return convolve_separable(plane, kernel, kernel);
}

RasterImage gaussian_blur(const RasterImage& img, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  RasterImage out(img.width(), img.height(), img.channels());
  FloatImage plane(img.width(), img.height());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) plane.at(x, y) = img.at(x, y, c);
    const FloatImage blurred = convolve_separable(plane, kernel, kernel);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(x, y, c) = static_cast<std::uint8_t>(
            std::clamp(std::nearbyint(blurred.at(x, y)), 0.0f, 255.0f));
  }
  return out;
}

}  // namespace invizo
