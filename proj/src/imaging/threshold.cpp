#include "invizo/imaging/threshold.hpp"

#include <string>

#include "invizo/core/error.hpp"

namespace invizo {

std::array<std::uint64_t, 256> histogram(const RasterImage& gray) {
  require(gray.channels() == 1, "histogram expects a single-channel image");
  std::array<std::uint64_t, 256> hist{};
  for (auto v : gray.data()) ++hist[v];
  return hist;
}

std::optional<int> otsu_threshold(const RasterImage& gray) {
  const auto hist = histogram(gray);
  const double total = static_cast<double>(gray.pixel_count());
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];

  double best = 0.0;
  std::optional<int> best_t;
  double w0 = 0.0, sum0 = 0.0;
  // Class 0 is [0, t), class 1 is [t, 255].
  for (int t = 1; t < 256; ++t) {
    w0 += static_cast<double>(hist[t - 1]);
    sum0 += static_cast<double>(t - 1) * hist[t - 1];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

BinarizeResult binarize(const RasterImage& gray, ThresholdMode mode) {
  require(gray.channels() == 1, "binarize expects a single-channel image");
  BinarizeResult result;
  if (const auto* fixed = std::get_if<FixedThreshold>(&mode)) {
    require(fixed->value >= 0 && fixed->value <= 255,
            "fixed threshold must lie in [0,255], got " + std::to_string(fixed->value));
    result.threshold = fixed->value;
  } else if (auto t = otsu_threshold(gray)) {
    result.threshold = *t;
  } else {
    result.threshold = kOtsuFallbackThreshold;
    result.otsu_fallback = true;
  }
  result.image = gray;
  for (auto& v : result.image.data()) v = v >= result.threshold ? 255 : 0;
  return result;
}

}  // namespace invizo
