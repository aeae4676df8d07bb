#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace invizo::oracle {

LevenshteinTable::LevenshteinTable(int max_len, int symbols) {
  strings_.push_back(U"");
  tail_.push_back(0);
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t end = strings_.size();
    // Strings of length len are a letter followed by a string of length len-1.
    for (int c = 0; c < symbols; ++c)
      for (std::size_t t = begin; t < end; ++t) {
        strings_.push_back(static_cast<char32_t>(U'a' + c) + strings_[t]);
        tail_.push_back(t);
      }
    begin = end;
  }
  const std::size_t n = strings_.size();
  table_.assign(n * n, 0);
  // Shorter strings come first, so every tail is filled before it is read.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = strings_[i];
      const auto& b = strings_[j];
      if (a.empty()) {
        table_[i * n + j] = static_cast<std::uint8_t>(b.size());
      } else if (b.empty()) {
        table_[i * n + j] = static_cast<std::uint8_t>(a.size());
      } else {
        const int del = table_[tail_[i] * n + j] + 1;
        const int ins = table_[i * n + tail_[j]] + 1;
        const int sub = table_[tail_[i] * n + tail_[j]] + (a[0] == b[0] ? 0 : 1);
        table_[i * n + j] = static_cast<std::uint8_t>(std::min({del, ins, sub}));
      }
    }
}

namespace {

RasterImage morph(const RasterImage& img, bool erode) {
  RasterImage out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      int v = erode ? 255 : 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!img.contains(x + dx, y + dy)) continue;
          const int p = img.at(x + dx, y + dy);
          v = erode ? std::min(v, p) : std::max(v, p);
        }
      out.at(x, y) = static_cast<std::uint8_t>(v);
    }
  return out;
}

}  // namespace

RasterImage erode3(const RasterImage& img) { return morph(img, true); }
RasterImage dilate3(const RasterImage& img) { return morph(img, false); }

bool point_in_polygon(const Polygon& poly, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

double monte_carlo_iou(const Polygon& a, const Polygon& b, std::size_t samples, std::uint64_t seed) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto* poly : {&a, &b})
    for (const auto& p : *poly) {
      x0 = std::min(x0, p.x), y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ux(rng), y = uy(rng);
    const bool ia = point_in_polygon(a, x, y), ib = point_in_polygon(b, x, y);
    both += ia && ib;
    either += ia || ib;
  }
  return either ? static_cast<double>(both) / static_cast<double>(either) : 0.0;
}

bool valid_date(int day, int month, int year) {
  if (day < 1 || month < 1 || year < 1) return false;
  const std::chrono::year_month_day ymd{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                                        std::chrono::day(static_cast<unsigned>(day))};
  return ymd.ok();
}

}  // namespace invizo::oracle
