#pragma once

#include <vector>

#include "invizo/imaging/raster.hpp"

namespace invizo::registration {

struct Keypoint {
  double x = 0.0;  // full-resolution pixel-centre coordinates
  double y = 0.0;
  double scale = 0.0;        // sigma of the detection level, full resolution
  double orientation = 0.0;  // radians, dominant gradient direction
  double response = 0.0;     // interpolated DoG value
  int octave = 0;
  int layer = 0;  // Gaussian layer within the octave used for description
};

struct ScaleSpaceParams {
  int scales_per_octave = 3;
  double base_sigma = 1.6;
  double assumed_blur = 0.5;  // blur already present in the input
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;
  int min_octave_size = 16;
};

// Gaussian and difference-of-Gaussian pyramids on [0,1] intensities.
struct ScaleSpace {
  ScaleSpaceParams params;
  std::vector<std::vector<FloatImage>> gaussians;  // [octave][scales + 3]
  std::vector<std::vector<FloatImage>> dogs;       // [octave][scales + 2]

  double layer_sigma(int layer) const;  // octave-relative sigma
};

ScaleSpace build_scale_space(const RasterImage& gray, const ScaleSpaceParams& params = {});

// DoG extrema over 3x3x3 neighbourhoods, refined to sub-pixel/sub-scale
// accuracy, filtered by contrast and by the Hessian edge ratio, and given
// the dominant orientation of a 36-bin gradient histogram. Ordered by
// octave, then y, then x. Images smaller than 32 px on a side yield none.
std::vector<Keypoint> detect_keypoints(const ScaleSpace& space);
std::vector<Keypoint> detect_keypoints(const RasterImage& gray, const ScaleSpaceParams& params = {});

}  // namespace invizo::registration
