#include "invizo/registration/descriptors.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace invizo::registration {
namespace {

constexpr int kCells = 4;
constexpr int kBins = 8;
constexpr double kCellWidthSigmas = 3.0;
constexpr double kClip = 0.2;

std::optional<Descriptor> describe(const FloatImage& img, double cx, double cy, double sigma,
                                   double orientation) {
  const double cell_width = kCellWidthSigmas * sigma;
  const int radius =
      static_cast<int>(std::lround(cell_width * std::numbers::sqrt2 * (kCells + 1) * 0.5));
  const int ix = static_cast<int>(std::lround(cx));
  const int iy = static_cast<int>(std::lround(cy));
  if (ix - radius < 1 || iy - radius < 1 || ix + radius > img.width - 2 || iy + radius > img.height - 2)
    return std::nullopt;

  const double cos_t = std::cos(orientation) / cell_width;
  const double sin_t = std::sin(orientation) / cell_width;
  const double weight_scale = -1.0 / (2.0 * (0.5 * kCells) * (0.5 * kCells));
  constexpr double kBinsPerRad = kBins / (2.0 * std::numbers::pi);

  // Padded histogram so interpolation may spill one cell/bin outside.
  constexpr int kRows = kCells + 2;
  constexpr int kOri = kBins + 2;
  std::array<double, kRows * kRows * kOri> hist{};

  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double rot_x = cos_t * dx + sin_t * dy;
      const double rot_y = -sin_t * dx + cos_t * dy;
      const double rbin = rot_y + 0.5 * kCells - 0.5;
      const double cbin = rot_x + 0.5 * kCells - 0.5;
      if (rbin <= -1.0 || rbin >= kCells || cbin <= -1.0 || cbin >= kCells) continue;
      const int x = ix + dx;
      const int y = iy + dy;
      const double gx = img.at(x + 1, y) - img.at(x - 1, y);
      const double gy = img.at(x, y + 1) - img.at(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) - orientation;
      angle = std::fmod(angle, 2.0 * std::numbers::pi);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      const double obin = angle * kBinsPerRad;
      const double value = mag * std::exp((rot_x * rot_x + rot_y * rot_y) * weight_scale);

      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      int o0 = static_cast<int>(std::floor(obin));
      const double fr = rbin - r0;
      const double fc = cbin - c0;
      const double fo = obin - o0;
      if (o0 < 0) o0 += kBins;
      if (o0 >= kBins) o0 -= kBins;
      for (int a = 0; a <= 1; ++a) {
        const double wr = a ? fr : 1.0 - fr;
        for (int b = 0; b <= 1; ++b) {
          const double wc = b ? fc : 1.0 - fc;
          for (int c = 0; c <= 1; ++c) {
            const double wo = c ? fo : 1.0 - fo;
            hist[((r0 + 1 + a) * kRows + (c0 + 1 + b)) * kOri + o0 + c] += value * wr * wc * wo;
          }
        }
      }
    }
  }

  std::array<double, kDescriptorSize> raw{};
  for (int r = 0; r < kCells; ++r)
    for (int c = 0; c < kCells; ++c) {
      const double* cell = hist.data() + ((r + 1) * kRows + (c + 1)) * kOri;
      for (int o = 0; o < kBins; ++o) {
        double v = cell[o];
        if (o == 0) v += cell[kBins];  // spill from the last bin wraps to 0
        raw[(r * kCells + c) * kBins + o] = v;
      }
    }

  const auto normalize = [&raw]() {
    double norm = 0.0;
    for (double v : raw) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    for (double& v : raw) v /= norm;
    return true;
  };
  if (!normalize()) return std::nullopt;
  for (double& v : raw) v = std::min(v, kClip);
  if (!normalize()) return std::nullopt;

  Descriptor d;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) d[i] = static_cast<float>(raw[i]);
  return d;
}

}  // namespace

DescriptorSet compute_descriptors(const ScaleSpace& space, const std::vector<Keypoint>& keypoints) {
  DescriptorSet out;
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    const Keypoint& kp = keypoints[i];
    if (kp.octave < 0 || static_cast<std::size_t>(kp.octave) >= space.gaussians.size()) continue;
    const auto& octave = space.gaussians[kp.octave];
    if (kp.layer < 0 || static_cast<std::size_t>(kp.layer) >= octave.size()) continue;
    const double inv = std::ldexp(1.0, -kp.octave);
    if (auto d = describe(octave[kp.layer], kp.x * inv, kp.y * inv, kp.scale * inv, kp.orientation)) {
      out.descriptors.push_back(*d);
      out.keypoint_index.push_back(i);
    }
  }
  return out;
}

DescriptorSet compute_descriptors(const RasterImage& gray, const std::vector<Keypoint>& keypoints,
                                  const ScaleSpaceParams& params) {
  return compute_descriptors(build_scale_space(gray, params), keypoints);
}

}  // namespace invizo::registration
