#include "invizo/registration/warp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "invizo/core/error.hpp"
#include "invizo/imaging/resample.hpp"
#include "invizo/registration/homography.hpp"

namespace invizo::registration {
namespace {

double edge(const Point2& a, const Point2& b) { return std::hypot(b.x - a.x, b.y - a.y); }

Quad clockwise(const Quad& q) {
  if (signed_area(q) >= 0.0) return q;
  return {q[0], q[3], q[2], q[1]};
}

}  // namespace

ExtractSize extract_size(const Quad& quad) {
  const Quad q = clockwise(quad);
  const double w = 0.5 * (edge(q[0], q[1]) + edge(q[3], q[2]));
  const double h = 0.5 * (edge(q[1], q[2]) + edge(q[0], q[3]));
  return {std::max(1, static_cast<int>(std::lround(w))), std::max(1, static_cast<int>(std::lround(h)))};
}

RasterImage warp_extract(const RasterImage& img, const Quad& quad) {
  const Quad q = clockwise(quad);
  if (std::abs(signed_area(q)) < 4.0 || !is_simple(to_polygon(q)))
    fail(ErrorCode::DegenerateRegion, "field quad is degenerate (area < 4 px^2 or self-intersecting)");
  const ExtractSize size = extract_size(q);
  const double w = size.width;
  const double h = size.height;
  const std::vector<Correspondence> corners = {
      {{0, 0}, q[0]}, {{w, 0}, q[1]}, {{w, h}, q[2]}, {{0, h}, q[3]}};
  const Homography rect_to_quad = fit_homography_dlt(corners);
  // Continuous coordinates put pixel centres at +0.5; the warp samples on
  // integer centres, so shift on both sides.
  const Homography to_centre(Mat3{1, 0, 0.5, 0, 1, 0.5, 0, 0, 1});
  const Homography from_centre(Mat3{1, 0, -0.5, 0, 1, -0.5, 0, 0, 1});
  Mat3 m = (from_centre * rect_to_quad * to_centre).matrix();
  // Snap DLT round-off so axis-aligned integer quads sample exactly on pixels.
  for (double& v : m) {
    const double r = std::nearbyint(v);
    if (std::abs(v - r) < 1e-9) v = r;
  }
  return warp_perspective(img, m, size.width, size.height, 255);
}

}  // namespace invizo::registration
