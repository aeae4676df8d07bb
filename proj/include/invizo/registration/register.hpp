#pragma once

#include <cstddef>

#include "invizo/imaging/raster.hpp"
#include "invizo/registration/homography.hpp"
#include "invizo/registration/keypoints.hpp"

namespace invizo::registration {

struct RegistrationParams {
  ScaleSpaceParams scale_space;
  RansacParams ransac;
};

struct RegistrationResult {
  Homography h;  // template coordinates -> test coordinates
  std::size_t template_keypoints = 0;
  std::size_t test_keypoints = 0;
  std::size_t matches = 0;
  std::size_t inliers = 0;
};

// Keypoints + descriptors on both grayscale images, cross-checked matching,
// RANSAC homography. Points are exchanged in continuous coordinates (pixel
// centre at +0.5) so the result maps template quads directly. Any failure to
// find a consistent model surfaces as RegistrationFailed.
RegistrationResult register_images(const RasterImage& template_gray, const RasterImage& test_gray,
                                   const RegistrationParams& params = {});

}  // namespace invizo::registration
