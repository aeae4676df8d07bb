#include "invizo/synthesis/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "invizo/core/error.hpp"
#include "invizo/imaging/resample.hpp"

namespace invizo::synthesis {
namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal(std::mt19937_64& rng) {
  double u1 = uniform(rng);
  while (u1 <= 0.0) u1 = uniform(rng);
  const double u2 = uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0, 255.0)); }

void validate(const AugmentSpec& s) {
  if (s.lined) require(s.lined->spacing >= 2 && s.lined->intensity >= 0 && s.lined->intensity <= 255, "lined background out of range");
  if (s.dotted) require(s.dotted->spacing >= 2 && s.dotted->intensity >= 0 && s.dotted->intensity <= 255, "dotted background out of range");
  if (s.rotation_deg) require(std::abs(*s.rotation_deg) <= 45.0, "rotation must lie within +-45 degrees");
  if (s.motion_blur) require(s.motion_blur->length >= 1 && s.motion_blur->length <= 64, "motion blur length must lie in 1..64");
  if (s.low_res_factor) require(*s.low_res_factor >= 1.0 && *s.low_res_factor <= 16.0, "low-res factor must lie in 1..16");
  if (s.gaussian_sigma) require(*s.gaussian_sigma >= 0.0 && *s.gaussian_sigma <= 100.0, "noise sigma must lie in 0..100");
  if (s.salt_pepper_rate) require(*s.salt_pepper_rate >= 0.0 && *s.salt_pepper_rate <= 1.0, "salt-and-pepper rate must lie in 0..1");
}

// Ink stays on top: every pixel keeps the darker of itself and the paper.
void background(RasterImage& img, const AugmentSpec& s) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      int paper = 255;
      if (s.lined && y % s.lined->spacing == s.lined->spacing - 1) paper = std::min(paper, 255 - s.lined->intensity);
      if (s.dotted && y % s.dotted->spacing == s.dotted->spacing / 2 && x % s.dotted->spacing == s.dotted->spacing / 2)
        paper = std::min(paper, 255 - s.dotted->intensity);
      for (int c = 0; c < img.channels(); ++c)
        img.at(x, y, c) = static_cast<std::uint8_t>(std::min<int>(img.at(x, y, c), paper));
    }
}

RasterImage rotate(const RasterImage& img, double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  const double cx = (img.width() - 1) * 0.5, cy = (img.height() - 1) * 0.5;
  const double c = std::cos(a), s = std::sin(a);
  // Inverse rotation about the centre.
  const Mat3 inv = {c, s, cx - c * cx - s * cy, -s, c, cy + s * cx - c * cy, 0, 0, 1};
  return warp_perspective(img, inv, img.width(), img.height(), 255);
}

RasterImage motion_blur(const RasterImage& img, const MotionBlur& mb) {
  if (mb.length <= 1) return img;
  const double a = mb.angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(a), dy = std::sin(a);
  RasterImage out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int ch = 0; ch < img.channels(); ++ch) {
        double sum = 0.0;
        for (int k = 0; k < mb.length; ++k) {
          const double t = k - (mb.length - 1) * 0.5;
          sum += sample_bilinear(img, x + t * dx, y + t * dy, ch, 255.0);
        }
        out.at(x, y, ch) = clamp8(sum / mb.length);
      }
  return out;
}

RasterImage low_res(const RasterImage& img, double factor) {
  const int w = std::max(1, static_cast<int>(std::lround(img.width() / factor)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() / factor)));
  return resize(resize(img, w, h), img.width(), img.height());
}

}  // namespace

RasterImage augment(const RasterImage& img, const AugmentSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  RasterImage out = img;
  if (spec.lined || spec.dotted) background(out, spec);
  if (spec.rotation_deg && *spec.rotation_deg != 0.0) out = rotate(out, *spec.rotation_deg);
  if (spec.motion_blur) out = motion_blur(out, *spec.motion_blur);
  if (spec.low_res_factor && *spec.low_res_factor > 1.0) out = low_res(out, *spec.low_res_factor);
  if (spec.gaussian_sigma && *spec.gaussian_sigma > 0.0)
    for (auto& v : out.data()) v = clamp8(v + *spec.gaussian_sigma * normal(rng));
  if (spec.salt_pepper_rate && *spec.salt_pepper_rate > 0.0) {
    const std::size_t px = out.pixel_count();
    for (std::size_t i = 0; i < px; ++i) {
      if (uniform(rng) >= *spec.salt_pepper_rate) continue;
      const std::uint8_t v = (rng() & 1) ? 255 : 0;
      for (int c = 0; c < out.channels(); ++c) out.data()[i * out.channels() + c] = v;
    }
  }
  return out;
}

}  // namespace invizo::synthesis
