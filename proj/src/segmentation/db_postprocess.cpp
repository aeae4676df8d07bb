#include <algorithm>
#include <cmath>
#include <limits>

#include "invizo/core/error.hpp"
#include "invizo/segmentation/segmentation.hpp"

namespace invizo::segmentation {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Rotates so the vertex with the smallest x + y (then smallest y) leads,
// and makes the winding clockwise on a y-down image.
Quad canonical(Quad q) {
  if (signed_area(q) < 0) q = {q[0], q[3], q[2], q[1]};
  std::size_t lead = 0;
  for (std::size_t i = 1; i < 4; ++i) {
    const double s = q[i].x + q[i].y, best = q[lead].x + q[lead].y;
    if (s < best - 1e-9 || (std::abs(s - best) <= 1e-9 && q[i].y < q[lead].y)) lead = i;
  }
  Quad out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = q[(lead + i) % 4];
  return out;
}

struct Component {
  std::vector<std::pair<int, int>> pixels;
  double score = 0.0;
};

std::vector<Component> components(const ProbabilityMap& p, double thresh) {
  std::vector<Component> out;
  std::vector<char> seen(p.values.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * p.width + x;
      if (seen[idx] || !(p.values[idx] > thresh)) continue;
      Component c;
      double sum = 0.0;
      seen[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        c.pixels.push_back({cx, cy});
        sum += p.at(cx, cy);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= p.width || ny >= p.height) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * p.width + nx;
            if (seen[n] || !(p.values[n] > thresh)) continue;
            seen[n] = 1;
            stack.push_back({nx, ny});
          }
      }
      c.score = sum / static_cast<double>(c.pixels.size());
      out.push_back(std::move(c));
    }
  return out;
}

Point2 centroid(const Quad& q) {
  return {(q[0].x + q[1].x + q[2].x + q[3].x) / 4, (q[0].y + q[1].y + q[2].y + q[3].y) / 4};
}

}  // namespace

ProbabilityMap::ProbabilityMap(int w, int h, double fill)
    : width(w), height(h), values(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill) {}

ProbabilityMap approx_binary_map(const ProbabilityMap& p, const ProbabilityMap& t, double k) {
  require(p.width == t.width && p.height == t.height, "probability and threshold maps differ in size");
  require(k > 0.0, "approximate binarization factor must be positive");
  ProbabilityMap b(p.width, p.height);
  for (std::size_t i = 0; i < p.values.size(); ++i)
    b.values[i] = 1.0 / (1.0 + std::exp(-k * (p.values[i] - t.values[i])));
  return b;
}

Quad min_area_rect(const std::vector<Point2>& points) {
  require(!points.empty(), "min_area_rect needs at least one point");
  const auto hull = convex_hull(points);
  if (hull.size() < 3) {
    const Box b = bounding_box(hull);
    return rect_quad(b.x0, b.y0, b.x1, b.y1);
  }
  double best_area = std::numeric_limits<double>::infinity();
  Quad best{};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) continue;
    const double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;
    double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u, lo_v = lo_u, hi_v = -lo_u;
    for (const Point2& p : hull) {
      const double u = (p.x - a.x) * ux + (p.y - a.y) * uy;
      const double v = -(p.x - a.x) * uy + (p.y - a.y) * ux;
      lo_u = std::min(lo_u, u), hi_u = std::max(hi_u, u);
      lo_v = std::min(lo_v, v), hi_v = std::max(hi_v, v);
    }
    const double area = (hi_u - lo_u) * (hi_v - lo_v);
    if (area < best_area - 1e-9) {
      best_area = area;
      const auto at = [&](double u, double v) { return Point2{a.x + u * ux - v * uy, a.y + u * uy + v * ux}; };
      best = {at(lo_u, lo_v), at(hi_u, lo_v), at(hi_u, hi_v), at(lo_u, hi_v)};
    }
  }
  return canonical(best);
}

std::vector<LineBox> box_formation(const ProbabilityMap& p, const BoxParams& params) {
  require(params.bin_thresh > 0.0 && params.bin_thresh < 1.0, "bin_thresh must lie in (0, 1)");
  require(params.box_thresh > 0.0 && params.box_thresh < 1.0, "box_thresh must lie in (0, 1)");
  require(params.unclip_ratio >= 0.0, "unclip_ratio must be non-negative");
  std::vector<LineBox> boxes;
  for (const Component& c : components(p, params.bin_thresh)) {
    if (c.score < params.box_thresh || static_cast<int>(c.pixels.size()) < params.min_area_px) continue;
    std::vector<Point2> corners;
    corners.reserve(c.pixels.size() * 4);
    for (const auto& [x, y] : c.pixels) {
      corners.push_back({double(x), double(y)});
      corners.push_back({x + 1.0, double(y)});
      corners.push_back({x + 1.0, y + 1.0});
      corners.push_back({double(x), y + 1.0});
    }
    const Quad rect = min_area_rect(corners);
    const double w = std::hypot(rect[1].x - rect[0].x, rect[1].y - rect[0].y);
    const double h = std::hypot(rect[3].x - rect[0].x, rect[3].y - rect[0].y);
    const double area = w * h;
    const double perim = 2 * (w + h);
    const double d = perim > 0 ? area * params.unclip_ratio / perim : 0.0;
    // Offsetting a rectangle by d with mitred corners grows each side by 2d.
    const double ux = w > 0 ? (rect[1].x - rect[0].x) / w : 1.0, uy = w > 0 ? (rect[1].y - rect[0].y) / w : 0.0;
    const double vx = h > 0 ? (rect[3].x - rect[0].x) / h : 0.0, vy = h > 0 ? (rect[3].y - rect[0].y) / h : 1.0;
    const double du[4] = {-d, d, d, -d};
    const double dv[4] = {-d, -d, d, d};
    Quad grown;
    for (int i = 0; i < 4; ++i) {
      const double x = rect[i].x + du[i] * ux + dv[i] * vx;
      const double y = rect[i].y + du[i] * uy + dv[i] * vy;
      grown[i] = {std::clamp(x, 0.0, double(p.width)), std::clamp(y, 0.0, double(p.height))};
    }
    if (std::abs(signed_area(grown)) <= 0.0) continue;
    boxes.push_back({canonical(grown), c.score});
  }

  // Row bands: a box joins the band whose first member spans its centre.
  std::sort(boxes.begin(), boxes.end(), [](const LineBox& a, const LineBox& b) {
    return centroid(a.quad).y < centroid(b.quad).y;
  });
  std::vector<LineBox> ordered;
  std::size_t i = 0;
  while (i < boxes.size()) {
    const Box lead = bounding_box(to_polygon(boxes[i].quad));
    std::size_t j = i + 1;
    while (j < boxes.size() && centroid(boxes[j].quad).y <= lead.y1) ++j;
    std::stable_sort(boxes.begin() + i, boxes.begin() + j, [](const LineBox& a, const LineBox& b) {
      return centroid(a.quad).x > centroid(b.quad).x;
    });
    ordered.insert(ordered.end(), boxes.begin() + i, boxes.begin() + j);
    i = j;
  }
  return ordered;
}

}  // namespace invizo::segmentation
