#pragma once

#include <filesystem>
#include <vector>

#include "invizo/core/geometry.hpp"
#include "invizo/imaging/raster.hpp"

namespace invizo::segmentation {

// Per-pixel values in [0, 1], row-major.
struct ProbabilityMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ProbabilityMap() = default;
  ProbabilityMap(int w, int h, double fill = 0.0);

  double at(int x, int y) const noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct LineBox {
  Quad quad{};  // clockwise, first vertex nearest the top-left
  double score = 0.0;
};

// External text detectors plug in here; the repository ships none.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual ProbabilityMap detect(const RasterImage& image) const = 0;
};

// B = 1 / (1 + exp(-k (P - T))).
ProbabilityMap approx_binary_map(const ProbabilityMap& p, const ProbabilityMap& t, double k = 50.0);

struct BoxParams {
  double bin_thresh = 0.3;
  double box_thresh = 0.6;
  double unclip_ratio = 1.5;
  int min_area_px = 16;
};

// Components of P > bin_thresh (8-connected), scored by mean P, boxed by the
// minimum-area rotated rectangle and pushed outward by area * ratio /
// perimeter. Clamped to the map and ordered top-to-bottom, then
// right-to-left within a text row.
std::vector<LineBox> box_formation(const ProbabilityMap& p, const BoxParams& params = {});

struct ProjectionParams {
  int smooth_window = 5;
  double min_density = 0.02;
  int min_gap = 3;
  int expand_px = 2;
};

// Row ink-density segmentation of a binary (ink = 0) field image.
std::vector<LineBox> segment_lines_projection(const RasterImage& binary_field,
                                              const ProjectionParams& params = {});

// Minimum-area enclosing rectangle of a point set (rotating calipers over
// the convex hull), clockwise on a y-down image.
Quad min_area_rect(const std::vector<Point2>& points);

// Raw file: uint32 width, uint32 height (little-endian), then width*height
// float32 little-endian values.
ProbabilityMap read_probability_map(const std::filesystem::path& path);
void write_probability_map(const std::filesystem::path& path, const ProbabilityMap& map);

}  // namespace invizo::segmentation
