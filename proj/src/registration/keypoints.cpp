#include "invizo/registration/keypoints.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "invizo/imaging/filter.hpp"

namespace invizo::registration {
namespace {

constexpr int kImageBorder = 5;
constexpr int kMaxInterpolationSteps = 5;
constexpr int kOrientationBins = 36;

FloatImage downsample2(const FloatImage& src) {
  FloatImage out(src.width / 2, src.height / 2);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) out.at(x, y) = src.at(2 * x, 2 * y);
  return out;
}

FloatImage subtract(const FloatImage& a, const FloatImage& b) {
  FloatImage out(a.width, a.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
  return out;
}

bool is_extremum(const std::vector<FloatImage>& dog, int layer, int x, int y) {
  const float v = dog[layer].at(x, y);
  const bool maximum = v > 0;
  for (int l = layer - 1; l <= layer + 1; ++l)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (l == layer && dx == 0 && dy == 0) continue;
        const float n = dog[l].at(x + dx, y + dy);
        if (maximum ? n > v : n < v) return false;
      }
  return true;
}

struct Refined {
  int x, y, layer;
  double dx, dy, ds;  // sub-sample offsets
  double value;
};

// Quadratic fit of the DoG around (x, y, layer), re-centring on the
// neighbouring sample while the offset exceeds half a sample.
std::optional<Refined> refine(const std::vector<FloatImage>& dog, int layer, int x, int y,
                              int scales) {
  const int w = dog[0].width;
  const int h = dog[0].height;
  for (int step = 0; step < kMaxInterpolationSteps; ++step) {
    const FloatImage& prev = dog[layer - 1];
    const FloatImage& cur = dog[layer];
    const FloatImage& next = dog[layer + 1];
    const double v2 = 2.0 * cur.at(x, y);
    const std::array<double, 3> g = {
        0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y)),
        0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1)),
        0.5 * (next.at(x, y) - prev.at(x, y)),
    };
    const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - v2;
    const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - v2;
    const double dss = next.at(x, y) + prev.at(x, y) - v2;
    const double dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) - cur.at(x + 1, y - 1) +
                               cur.at(x - 1, y - 1));
    const double dxs = 0.25 * (next.at(x + 1, y) - next.at(x - 1, y) - prev.at(x + 1, y) +
                               prev.at(x - 1, y));
    const double dys = 0.25 * (next.at(x, y + 1) - next.at(x, y - 1) - prev.at(x, y + 1) +
                               prev.at(x, y - 1));
    // Solve H * off = -g by Cramer's rule (3x3 symmetric).
    const double a = dxx, b = dxy, c = dxs, d = dyy, e = dys, f = dss;
    const double det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d);
    if (std::abs(det) < 1e-12) return std::nullopt;
    const double i00 = (d * f - e * e) / det, i01 = (c * e - b * f) / det, i02 = (b * e - c * d) / det;
    const double i11 = (a * f - c * c) / det, i12 = (b * c - a * e) / det, i22 = (a * d - b * b) / det;
    const double ox = -(i00 * g[0] + i01 * g[1] + i02 * g[2]);
    const double oy = -(i01 * g[0] + i11 * g[1] + i12 * g[2]);
    const double os = -(i02 * g[0] + i12 * g[1] + i22 * g[2]);

    if (std::abs(ox) < 0.5 && std::abs(oy) < 0.5 && std::abs(os) < 0.5) {
      const double value = cur.at(x, y) + 0.5 * (g[0] * ox + g[1] * oy + g[2] * os);
      return Refined{x, y, layer, ox, oy, os, value};
    }
    if (std::abs(ox) > 1e3 || std::abs(oy) > 1e3 || std::abs(os) > 1e3) return std::nullopt;
    x += static_cast<int>(std::lround(ox));
    y += static_cast<int>(std::lround(oy));
    layer += static_cast<int>(std::lround(os));
    if (layer < 1 || layer > scales || x < kImageBorder || x >= w - kImageBorder ||
        y < kImageBorder || y >= h - kImageBorder)
      return std::nullopt;
  }
  return std::nullopt;
}

bool passes_edge_test(const FloatImage& dog, int x, int y, double ratio) {
  const double v2 = 2.0 * dog.at(x, y);
  const double dxx = dog.at(x + 1, y) + dog.at(x - 1, y) - v2;
  const double dyy = dog.at(x, y + 1) + dog.at(x, y - 1) - v2;
  const double dxy = 0.25 * (dog.at(x + 1, y + 1) - dog.at(x - 1, y + 1) - dog.at(x + 1, y - 1) +
                             dog.at(x - 1, y - 1));
  const double trace = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  if (det <= 0.0) return false;
  return trace * trace / det < (ratio + 1.0) * (ratio + 1.0) / ratio;
}

double dominant_orientation(const FloatImage& img, int cx, int cy, double sigma) {
  const double weight_sigma = 1.5 * sigma;
  const int radius = static_cast<int>(std::lround(3.0 * weight_sigma));
  std::array<double, kOrientationBins> hist{};
  for (int dy = -radius; dy <= radius; ++dy) {
    const int y = cy + dy;
    if (y <= 0 || y >= img.height - 1) continue;
    for (int dx = -radius; dx <= radius; ++dx) {
      const int x = cx + dx;
      if (x <= 0 || x >= img.width - 1) continue;
      const double gx = img.at(x + 1, y) - img.at(x - 1, y);
      const double gy = img.at(x, y + 1) - img.at(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const double wgt = std::exp(-(dx * dx + dy * dy) / (2.0 * weight_sigma * weight_sigma));
      double angle = std::atan2(gy, gx);
      if (angle < 0) angle += 2.0 * std::numbers::pi;
      int bin = static_cast<int>(std::floor(angle * kOrientationBins / (2.0 * std::numbers::pi)));
      bin = std::clamp(bin, 0, kOrientationBins - 1);
      hist[bin] += wgt * mag;
    }
  }
  // [1 4 6 4 1] / 16 circular smoothing
  std::array<double, kOrientationBins> smooth{};
  for (int i = 0; i < kOrientationBins; ++i) {
    const auto at = [&](int k) { return hist[(i + k + kOrientationBins) % kOrientationBins]; };
    smooth[i] = (at(-2) + at(2) + 4.0 * (at(-1) + at(1)) + 6.0 * at(0)) / 16.0;
  }
  int peak = 0;
  for (int i = 1; i < kOrientationBins; ++i)
    if (smooth[i] > smooth[peak]) peak = i;
  const double l = smooth[(peak - 1 + kOrientationBins) % kOrientationBins];
  const double r = smooth[(peak + 1) % kOrientationBins];
  const double denom = l - 2.0 * smooth[peak] + r;
  const double shift = denom != 0.0 ? 0.5 * (l - r) / denom : 0.0;
  double angle = (peak + 0.5 + shift) * 2.0 * std::numbers::pi / kOrientationBins;
  if (angle >= 2.0 * std::numbers::pi) angle -= 2.0 * std::numbers::pi;
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  return angle;
}

}  // namespace

double ScaleSpace::layer_sigma(int layer) const {
  return params.base_sigma * std::pow(2.0, static_cast<double>(layer) / params.scales_per_octave);
}

ScaleSpace build_scale_space(const RasterImage& gray, const ScaleSpaceParams& params) {
  ScaleSpace space;
  space.params = params;
  if (gray.width() < 32 || gray.height() < 32) return space;

  const int s = params.scales_per_octave;
  const double init = std::sqrt(std::max(params.base_sigma * params.base_sigma -
                                             params.assumed_blur * params.assumed_blur,
                                         0.01));
  FloatImage base = gaussian_blur(to_float(gray), init);

  while (std::min(base.width, base.height) >= params.min_octave_size) {
    std::vector<FloatImage> octave;
    octave.reserve(s + 3);
    octave.push_back(std::move(base));
    for (int i = 1; i < s + 3; ++i) {
      const double prev = space.layer_sigma(i - 1);
      const double total = space.layer_sigma(i);
      octave.push_back(gaussian_blur(octave.back(), std::sqrt(total * total - prev * prev)));
    }
    std::vector<FloatImage> dog;
    for (int i = 0; i + 1 < s + 3; ++i) dog.push_back(subtract(octave[i + 1], octave[i]));
    base = downsample2(octave[s]);
    space.gaussians.push_back(std::move(octave));
    space.dogs.push_back(std::move(dog));
  }
  return space;
}

std::vector<Keypoint> detect_keypoints(const ScaleSpace& space) {
  std::vector<Keypoint> out;
  const auto& p = space.params;
  const int s = p.scales_per_octave;
  const float pre_threshold = static_cast<float>(0.5 * p.contrast_threshold);

  for (std::size_t o = 0; o < space.dogs.size(); ++o) {
    const auto& dog = space.dogs[o];
    const int w = dog[0].width;
    const int h = dog[0].height;
    if (w <= 2 * kImageBorder || h <= 2 * kImageBorder) continue;
    const double octave_scale = std::ldexp(1.0, static_cast<int>(o));
    for (int layer = 1; layer <= s; ++layer) {
      for (int y = kImageBorder; y < h - kImageBorder; ++y) {
        for (int x = kImageBorder; x < w - kImageBorder; ++x) {
          if (std::abs(dog[layer].at(x, y)) < pre_threshold) continue;
          if (!is_extremum(dog, layer, x, y)) continue;
          const auto r = refine(dog, layer, x, y, s);
          if (!r || std::abs(r->value) < p.contrast_threshold) continue;
          if (!passes_edge_test(dog[r->layer], r->x, r->y, p.edge_ratio)) continue;

          const double sigma_octave = space.layer_sigma(r->layer) * std::pow(2.0, r->ds / s);
          const int g_layer = std::clamp(static_cast<int>(std::lround(r->layer + r->ds)), 1, s);
          Keypoint kp;
          kp.x = (r->x + r->dx) * octave_scale;
          kp.y = (r->y + r->dy) * octave_scale;
          kp.scale = sigma_octave * octave_scale;
          kp.response = r->value;
          kp.octave = static_cast<int>(o);
          kp.layer = g_layer;
          kp.orientation = dominant_orientation(space.gaussians[o][g_layer], r->x, r->y, sigma_octave);
          out.push_back(kp);
        }
      }
    }
  }

  const double max_x = space.gaussians.empty() ? 0.0 : space.gaussians[0][0].width;
  const double max_y = space.gaussians.empty() ? 0.0 : space.gaussians[0][0].height;
  std::erase_if(out, [&](const Keypoint& k) {
    return k.x < 0.0 || k.y < 0.0 || k.x >= max_x || k.y >= max_y;
  });
  std::stable_sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.octave != b.octave) return a.octave < b.octave;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.scale < b.scale;
  });
  // Refinement can land two extrema on the same location.
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Keypoint& a, const Keypoint& b) {
                          return a.octave == b.octave && a.x == b.x && a.y == b.y &&
                                 a.scale == b.scale;
                        }),
            out.end());
  return out;
}

std::vector<Keypoint> detect_keypoints(const RasterImage& gray, const ScaleSpaceParams& params) {
  return detect_keypoints(build_scale_space(gray, params));
}

}  // namespace invizo::registration
