#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/metrics/metrics.hpp"
#include "support/oracles.hpp"

using namespace invizo;
using namespace invizo::metrics;

namespace {

Quad rotated_rect(double cx, double cy, double w, double h, double a) {
  Quad q;
  const double dx[4] = {-w / 2, w / 2, w / 2, -w / 2}, dy[4] = {-h / 2, -h / 2, h / 2, h / 2};
  for (int i = 0; i < 4; ++i)
    q[i] = {cx + dx[i] * std::cos(a) - dy[i] * std::sin(a), cy + dx[i] * std::sin(a) + dy[i] * std::cos(a)};
  return q;
}

}  // namespace

TEST_CASE("cer and wer on hand examples") {
  CHECK(cer("بطاقة", "بطاقه") == doctest::Approx(0.2));
  CHECK(cer("abc", "") == 1.0);
  CHECK(cer("ab", "abcd") == 1.0);
  CHECK(wer("رقم الهوية الوطنية", "رقم الهويه الوطنية") == doctest::Approx(1.0 / 3));
  CHECK(wer("a b c d", "a c b d") == doctest::Approx(0.5));
  CHECK(wer("a  b", "a b") == 0.0);
  CHECK_THROWS_AS(cer("", "x"), Error);
}

TEST_CASE("cer and wer agree with the table oracle") {
  std::mt19937_64 rng(3);
  const std::u32string letters = U"ابت ث";
  for (int i = 0; i < 200; ++i) {
    std::u32string r, h;
    for (int k = 1 + rng() % 15; k > 0; --k) r += letters[rng() % letters.size()];
    for (int k = rng() % 15; k > 0; --k) h += letters[rng() % letters.size()];
    const std::string rs = utf8::encode(r), hs = utf8::encode(h);
    CHECK(cer(rs, hs) == double(oracle::edit_distance_table(r, h)) / r.size());
    const auto rw = utf8::split_words(rs), hw = utf8::split_words(hs);
    if (!rw.empty()) CHECK(wer(rs, hs) == double(oracle::edit_distance_table(rw, hw)) / rw.size());
  }
}

TEST_CASE("iou of axis-aligned and rotated boxes") {
  const Quad a = rect_quad(0, 0, 10, 10), b = rect_quad(5, 0, 15, 10);
  CHECK(quad_iou(a, b) == doctest::Approx(50.0 / 150.0));
  CHECK(quad_iou(a, a) == doctest::Approx(1.0));
  CHECK(quad_iou(a, rect_quad(20, 20, 30, 30)) == 0.0);
  Quad rev = b;
  std::swap(rev[1], rev[3]);
  CHECK(quad_iou(a, rev) == doctest::Approx(50.0 / 150.0));
  CHECK(intersection_area(to_polygon(a), to_polygon(rect_quad(2, 2, 4, 4))) == doctest::Approx(4.0));
  // square rotated 45 degrees inside its own bounding square
  const Quad diamond = rotated_rect(5, 5, 10 / std::sqrt(2.0), 10 / std::sqrt(2.0), std::numbers::pi / 4);
  CHECK(quad_iou(a, diamond) == doctest::Approx(0.5));
}

TEST_CASE("polygon iou agrees with Monte Carlo, including concave shapes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 40), ang(0, std::numbers::pi);
  for (int i = 0; i < 25; ++i) {
    const Quad p = rotated_rect(u(rng) + 20, u(rng) + 20, 10 + u(rng), 5 + u(rng) / 2, ang(rng));
    const Quad q = rotated_rect(u(rng) + 20, u(rng) + 20, 10 + u(rng), 5 + u(rng) / 2, ang(rng));
    const double exact = quad_iou(p, q);
    const double mc = oracle::monte_carlo_iou(to_polygon(p), to_polygon(q), 200000, rng());
    CHECK(std::abs(exact - mc) < 0.01);
  }
  const Polygon ell = {{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}};
  const Polygon box = {{2, 2}, {8, 2}, {8, 8}, {2, 8}};
  CHECK(intersection_area(ell, box) == doctest::Approx(6 * 2 + 2 * 4));
  CHECK(std::abs(polygon_iou(ell, box) - oracle::monte_carlo_iou(ell, box, 200000, 9)) < 0.01);
}

TEST_CASE("detection prf") {
  const Quad a = rect_quad(0, 0, 10, 10), b = rect_quad(20, 0, 30, 10);
  Prf r = detection_prf({a, b}, {a});
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.5);
  CHECK(r.f_measure == doctest::Approx(2.0 / 3));
  r = detection_prf({}, {});
  CHECK(r.true_positives == 0);
  r = detection_prf({a}, {rect_quad(6, 0, 16, 10)});
  CHECK(r.true_positives == 0);
  CHECK(r.f_measure == 0.0);
}

TEST_CASE("text report") {
  const TextReport r = evaluate_text({"ab", "abcd"}, {"ab", "abxd"}, {});
  REQUIRE(r.samples.size() == 2);
  CHECK(r.samples[0].id == "1");
  CHECK(r.cer == doctest::Approx(1.0 / 6));
  CHECK(r.mean_cer == doctest::Approx(0.125));
  CHECK(r.wer == doctest::Approx(0.5));
  const std::string tsv = to_tsv(r);
  CHECK(tsv.find("abxd") != std::string::npos);
  CHECK(to_json(r)["samples"] == 2);
  CHECK(to_json(Prf{1, 0.5, 2.0 / 3, 1})["true_positives"] == 1);
  CHECK_THROWS_AS(evaluate_text({"a"}, {}), Error);
}
