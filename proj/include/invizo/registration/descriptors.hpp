#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "invizo/registration/keypoints.hpp"

namespace invizo::registration {

inline constexpr std::size_t kDescriptorSize = 128;

// 4x4 spatial cells x 8 orientation bins, L2-normalized.
using Descriptor = std::array<float, kDescriptorSize>;

struct DescriptorSet {
  std::vector<Descriptor> descriptors;
  // keypoint_index[i] is the input keypoint described by descriptors[i].
  std::vector<std::size_t> keypoint_index;
};

// Gaussian-weighted gradient histograms in the keypoint's rotated and
// scaled frame, trilinearly interpolated, clipped at 0.2 and renormalized.
// Keypoints whose sampling window leaves the image, or whose window has no
// gradient, are skipped.
DescriptorSet compute_descriptors(const ScaleSpace& space, const std::vector<Keypoint>& keypoints);
DescriptorSet compute_descriptors(const RasterImage& gray, const std::vector<Keypoint>& keypoints,
                                  const ScaleSpaceParams& params = {});

}  // namespace invizo::registration
