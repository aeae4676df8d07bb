#include <algorithm>
#include <cmath>

#include "invizo/metrics/metrics.hpp"

namespace invizo::metrics {
namespace {

using Tri = std::array<Point2, 3>;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double area_abs(const Polygon& p) { return std::abs(signed_area(p)); }

// Clips a convex polygon against each edge of a counter-clockwise-in-math
// (positive cross) triangle.
Polygon clip(Polygon subject, const Tri& t) {
  for (int e = 0; e < 3 && !subject.empty(); ++e) {
    const Point2& a = t[e];
    const Point2& b = t[(e + 1) % 3];
    Polygon out;
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Point2& p = subject[i];
      const Point2& q = subject[(i + 1) % subject.size()];
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        const double s = dp / (dp - dq);
        out.push_back({p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)});
      }
    }
    subject = std::move(out);
  }
  return subject;
}

struct SignedTri {
  Tri t;
  double sign;
};

// Fan from vertex 0: the signed triangle indicators sum to the polygon's
// indicator, concave or not.
std::vector<SignedTri> fan(const Polygon& p) {
  std::vector<SignedTri> out;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    Tri t{p[0], p[i], p[i + 1]};
    const double c = cross(t[0], t[1], t[2]);
    if (c == 0.0) continue;
    if (c < 0) std::swap(t[1], t[2]);
    out.push_back({t, c > 0 ? 1.0 : -1.0});
  }
  return out;
}

}  // namespace

double intersection_area(const Polygon& a, const Polygon& b) {
  const auto fa = fan(a);
  const auto fb = fan(b);
  double total = 0.0;
  for (const auto& ta : fa)
    for (const auto& tb : fb) {
      const Polygon piece = clip(Polygon(ta.t.begin(), ta.t.end()), tb.t);
      if (piece.size() >= 3) total += ta.sign * tb.sign * area_abs(piece);
    }
  // Orientation of each polygon flips every sign in its fan.
  const double oa = signed_area(a) >= 0 ? 1.0 : -1.0;
  const double ob = signed_area(b) >= 0 ? 1.0 : -1.0;
  return std::max(0.0, total * oa * ob);
}

double polygon_iou(const Polygon& a, const Polygon& b) {
  const double inter = intersection_area(a, b);
  const double uni = area_abs(a) + area_abs(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double quad_iou(const Quad& a, const Quad& b) { return polygon_iou(to_polygon(a), to_polygon(b)); }

}  // namespace invizo::metrics
