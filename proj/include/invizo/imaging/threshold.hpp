#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

#include "invizo/imaging/raster.hpp"

namespace invizo {

struct FixedThreshold {
  int value = 127;
};
struct OtsuThreshold {};

using ThresholdMode = std::variant<FixedThreshold, OtsuThreshold>;

inline constexpr int kOtsuFallbackThreshold = 127;

struct BinarizeResult {
  RasterImage image;  // values in {0, 255}
  int threshold = 0;
  // Otsu found no split (constant image) and used kOtsuFallbackThreshold.
  bool otsu_fallback = false;
};

std::array<std::uint64_t, 256> histogram(const RasterImage& gray);

// Threshold t maximizing the between-class variance of {v < t} vs {v >= t};
// empty when every pixel has the same value.
std::optional<int> otsu_threshold(const RasterImage& gray);

// pixel >= threshold -> 255, otherwise 0.
BinarizeResult binarize(const RasterImage& gray, ThresholdMode mode = OtsuThreshold{});

}  // namespace invizo
