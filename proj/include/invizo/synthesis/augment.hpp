#pragma once

#include <cstdint>
#include <optional>

#include "invizo/imaging/raster.hpp"

namespace invizo::synthesis {

struct LinedBackground {
  int spacing = 16;       // px between lines, >= 2
  int intensity = 80;     // darkness of the lines, 0..255
};

struct DottedBackground {
  int spacing = 8;        // grid pitch, >= 2
  int intensity = 100;
};

struct MotionBlur {
  int length = 5;         // px, 1..64
  double angle_deg = 0.0;
};

// Disabled effects are left unset. Applied in this order: background,
// rotation, motion blur, low resolution, gaussian noise, salt and pepper.
struct AugmentSpec {
  std::optional<LinedBackground> lined;
  std::optional<DottedBackground> dotted;
  std::optional<double> rotation_deg;      // |deg| <= 45
  std::optional<MotionBlur> motion_blur;
  std::optional<double> low_res_factor;    // 1..16
  std::optional<double> gaussian_sigma;    // 0..100
  std::optional<double> salt_pepper_rate;  // 0..1
  std::uint64_t seed = 0;
};

// Throws ParameterError for out-of-range settings. Dimensions never change.
RasterImage augment(const RasterImage& img, const AugmentSpec& spec);

}  // namespace invizo::synthesis
