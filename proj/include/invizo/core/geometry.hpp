#pragma once

#include <array>
#include <vector>

namespace invizo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Four vertices; image coordinates are continuous with pixel (i, j)
// covering [i, i+1) x [j, j+1), y pointing down.
using Quad = std::array<Point2, 4>;
using Polygon = std::vector<Point2>;

// Shoelace sum; positive for clockwise order on a y-down image.
double signed_area(const Polygon& poly) noexcept;
double signed_area(const Quad& quad) noexcept;
double perimeter(const Polygon& poly) noexcept;

Polygon to_polygon(const Quad& quad);

// True when no two non-adjacent edges intersect and no vertices repeat.
bool is_simple(const Polygon& poly) noexcept;

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};
Box bounding_box(const Polygon& poly) noexcept;

// Axis-aligned rectangle as a clockwise quad starting top-left.
Quad rect_quad(double x0, double y0, double x1, double y1) noexcept;

}  // namespace invizo
