#include "invizo/imaging/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "invizo/core/error.hpp"

namespace invizo {
namespace {

struct Tap {
  int index;
  float weight;
};

// Per output sample, the input taps along one axis.
std::vector<std::vector<Tap>> axis_taps(int in_n, int out_n) {
  std::vector<std::vector<Tap>> taps(out_n);
  const double scale = static_cast<double>(in_n) / out_n;
  for (int o = 0; o < out_n; ++o) {
    if (out_n >= in_n) {
      const double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(in_n - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, in_n - 1);
      const double f = s - i0;
      taps[o].push_back({i0, static_cast<float>(1.0 - f)});
      if (f > 0.0) taps[o].push_back({i1, static_cast<float>(f)});
    } else {
      const double lo = o * scale;
      const double hi = (o + 1) * scale;
      for (int i = static_cast<int>(std::floor(lo)); i < std::min(in_n, static_cast<int>(std::ceil(hi))); ++i) {
        const double cover = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
        if (cover > 0.0) taps[o].push_back({i, static_cast<float>(cover / scale)});
      }
    }
  }
  return taps;
}

}  // namespace

RasterImage resize(const RasterImage& img, int width, int height) {
  require(width >= 1 && height >= 1, "resize target must be at least 1x1");
  if (width == img.width() && height == img.height()) return img;
  const auto xt = axis_taps(img.width(), width);
  const auto yt = axis_taps(img.height(), height);
  const int ch = img.channels();

  std::vector<float> tmp(static_cast<std::size_t>(width) * img.height() * ch, 0.0f);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < ch; ++c) {
        float v = 0.0f;
        for (const Tap& t : xt[x]) v += t.weight * img.at(t.index, y, c);
        tmp[(static_cast<std::size_t>(y) * width + x) * ch + c] = v;
      }

  RasterImage out(width, height, ch);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < ch; ++c) {
        float v = 0.0f;
        for (const Tap& t : yt[y]) v += t.weight * tmp[(static_cast<std::size_t>(t.index) * width + x) * ch + c];
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0f, 255.0f));
      }
  return out;
}

double sample_bilinear(const RasterImage& img, double x, double y, int channel, double fill) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double ax = x - fx;
  const double ay = y - fy;
  if (fx < -1.0 || fy < -1.0 || fx > img.width() || fy > img.height()) return fill;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const auto value = [&](int px, int py) {
    return img.contains(px, py) ? static_cast<double>(img.at(px, py, channel)) : fill;
  };
  double v = 0.0;
  // Zero-weight taps are skipped so exact integer positions never blend in
  // an out-of-bounds neighbour.
  if (ax < 1.0 && ay < 1.0) v += (1.0 - ax) * (1.0 - ay) * value(x0, y0);
  if (ax > 0.0 && ay < 1.0) v += ax * (1.0 - ay) * value(x0 + 1, y0);
  if (ax < 1.0 && ay > 0.0) v += (1.0 - ax) * ay * value(x0, y0 + 1);
  if (ax > 0.0 && ay > 0.0) v += ax * ay * value(x0 + 1, y0 + 1);
  return v;
}

namespace {

template <typename Sampler>
RasterImage warp_with(const RasterImage& src, const Mat3& m, int out_width, int out_height,
                      std::uint8_t fill, Sampler sample) {
  require(out_width >= 1 && out_height >= 1, "warp target must be at least 1x1");
  RasterImage out(out_width, out_height, src.channels(), fill);
  for (int y = 0; y < out_height; ++y)
    for (int x = 0; x < out_width; ++x) {
      const double wx = m[0] * x + m[1] * y + m[2];
      const double wy = m[3] * x + m[4] * y + m[5];
      const double ww = m[6] * x + m[7] * y + m[8];
      if (std::abs(ww) < 1e-12) continue;
      const double sx = wx / ww;
      const double sy = wy / ww;
      for (int c = 0; c < src.channels(); ++c) {
        const double v = sample(sx, sy, c);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0, 255.0));
      }
    }
  return out;
}

}  // namespace

RasterImage warp_perspective(const RasterImage& src, const Mat3& inverse, int out_width,
                             int out_height, std::uint8_t fill) {
  return warp_with(src, inverse, out_width, out_height, fill, [&](double x, double y, int c) {
    return sample_bilinear(src, x, y, c, fill);
  });
}

RasterImage warp_nearest(const RasterImage& src, const Mat3& inverse, int out_width,
                         int out_height, std::uint8_t fill) {
  return warp_with(src, inverse, out_width, out_height, fill, [&](double x, double y, int c) {
    const double rx = std::nearbyint(x);
    const double ry = std::nearbyint(y);
    if (rx < 0 || ry < 0 || rx >= src.width() || ry >= src.height()) return static_cast<double>(fill);
    return static_cast<double>(src.at(static_cast<int>(rx), static_cast<int>(ry), c));
  });
}

}  // namespace invizo

namespace invizo {

RasterImage fit_line_canvas(const RasterImage& img, int width, int height) {
  require(width >= 1 && height >= 1, "canvas must be at least 1x1");
  const int scaled_w = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(img.width()) * height / img.height())));
  RasterImage out(width, height, img.channels(), 255);
  if (scaled_w <= width) {
    const RasterImage line = resize(img, scaled_w, height);
    const int left = width - scaled_w;
    for (int y = 0; y < height; ++y)
      std::copy(line.row(y).begin(), line.row(y).end(), out.data().begin() + (static_cast<std::size_t>(y) * width + left) * img.channels());
    return out;
  }
  const int fit_h = std::max(1, static_cast<int>(std::lround(static_cast<double>(height) * width / scaled_w)));
  const RasterImage line = resize(img, width, fit_h);
  const int top = (height - fit_h) / 2;
  for (int y = 0; y < fit_h; ++y)
    std::copy(line.row(y).begin(), line.row(y).end(), out.data().begin() + static_cast<std::size_t>(top + y) * width * img.channels());
  return out;
}

}  // namespace invizo
