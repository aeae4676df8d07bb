#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "invizo/core/error.hpp"
#include "invizo/metrics/metrics.hpp"
#include "invizo/segmentation/segmentation.hpp"
#include "support/fixtures.hpp"

using namespace invizo;
using namespace invizo::segmentation;

namespace {

void fill_rect(ProbabilityMap& p, int x0, int y0, int x1, int y1, double v) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) p.at(x, y) = v;
}

}  // namespace

TEST_CASE("approx_binary_map is the logistic of k (P - T)") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  ProbabilityMap p(17, 11), t(17, 11);
  for (auto& v : p.values) v = u(rng);
  for (auto& v : t.values) v = u(rng);
  for (double k : {1.0, 50.0}) {
    const ProbabilityMap b = approx_binary_map(p, t, k);
    for (std::size_t i = 0; i < p.values.size(); ++i)
      CHECK(std::abs(b.values[i] - 1.0 / (1.0 + std::exp(-k * (p.values[i] - t.values[i])))) < 1e-12);
  }
  CHECK_THROWS_AS(approx_binary_map(p, ProbabilityMap(3, 3)), Error);
}

TEST_CASE("a rectangular blob is unclipped by area * ratio / perimeter") {
  ProbabilityMap p(100, 60);
  fill_rect(p, 10, 20, 40, 30, 0.9);
  const auto boxes = box_formation(p);
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0].score == doctest::Approx(0.9));
  const double d = 30.0 * 10.0 * 1.5 / 80.0;
  const Quad want = rect_quad(10 - d, 20 - d, 40 + d, 30 + d);
  for (int i = 0; i < 4; ++i) {
    CHECK(boxes[0].quad[i].x == doctest::Approx(want[i].x));
    CHECK(boxes[0].quad[i].y == doctest::Approx(want[i].y));
  }
}

TEST_CASE("weak, tiny and background components are dropped") {
  ProbabilityMap p(80, 40);
  fill_rect(p, 5, 5, 25, 15, 0.5);   // mean below box_thresh
  fill_rect(p, 40, 5, 43, 8, 0.95);  // 9 px < min_area_px
  fill_rect(p, 50, 20, 70, 30, 0.2); // below bin_thresh
  CHECK(box_formation(p).empty());
  CHECK_THROWS_AS(box_formation(p, {1.5, 0.6, 1.5, 16}), Error);
}

TEST_CASE("boxes are ordered top to bottom, then right to left") {
  ProbabilityMap p(200, 100);
  fill_rect(p, 10, 10, 50, 20, 0.9);
  fill_rect(p, 120, 12, 180, 22, 0.9);
  fill_rect(p, 60, 60, 100, 70, 0.9);
  const auto boxes = box_formation(p, {0.3, 0.6, 0.5, 16});
  REQUIRE(boxes.size() == 3);
  CHECK(boxes[0].quad[0].x > 100);
  CHECK(boxes[1].quad[0].x < 20);
  CHECK(boxes[2].quad[0].y > 50);
}

TEST_CASE("boxes are clamped to the map") {
  ProbabilityMap p(50, 30);
  fill_rect(p, 0, 0, 20, 8, 0.9);
  const auto boxes = box_formation(p);
  REQUIRE(boxes.size() == 1);
  for (const Point2& v : boxes[0].quad) {
    CHECK(v.x >= 0);
    CHECK(v.y >= 0);
  }
}

TEST_CASE("min_area_rect of a rotated rectangle") {
  const double a = 0.4, w = 30, h = 12;
  std::vector<Point2> pts;
  for (double s = 0; s <= 1.0; s += 0.1)
    for (double t = 0; t <= 1.0; t += 0.25) {
      const double x = s * w, y = t * h;
      pts.push_back({50 + x * std::cos(a) - y * std::sin(a), 40 + x * std::sin(a) + y * std::cos(a)});
    }
  const Quad q = min_area_rect(pts);
  CHECK(signed_area(q) == doctest::Approx(w * h).epsilon(1e-9));
  CHECK(perimeter(to_polygon(q)) == doctest::Approx(2 * (w + h)).epsilon(1e-9));
}

TEST_CASE("projection segmentation finds text rows") {
  RasterImage field(120, 90, 1, 255);
  for (int row : {10, 40, 70})
    for (int y = row; y < row + 10; ++y)
      for (int x = 5; x < 115; x += 3) field.at(x, y) = 0;
  const auto lines = segment_lines_projection(field);
  REQUIRE(lines.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const Box b = bounding_box(to_polygon(lines[i].quad));
    const double row = 10 + 30.0 * i;
    CHECK(b.y0 <= row);
    CHECK(b.y1 >= row + 10);
    CHECK(b.y1 - b.y0 < 20);
  }
  CHECK(segment_lines_projection(RasterImage(30, 30, 1, 255)).empty());
}

TEST_CASE("probability map file round trip") {
  ProbabilityMap p(7, 5);
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = i / 64.0;
  const auto dir = testing::temp_dir("pmap");
  write_probability_map(dir / "m.bin", p);
  const ProbabilityMap q = read_probability_map(dir / "m.bin");
  CHECK(q.width == 7);
  CHECK(q.values == p.values);
  std::filesystem::remove_all(dir);
}
