#include <algorithm>

#include "invizo/core/error.hpp"
#include "invizo/segmentation/segmentation.hpp"

namespace invizo::segmentation {

std::vector<LineBox> segment_lines_projection(const RasterImage& binary_field, const ProjectionParams& params) {
  require(binary_field.channels() == 1, "projection segmentation expects a single-channel image");
  require(params.smooth_window >= 1, "smoothing window must be positive");
  const int w = binary_field.width();
  const int h = binary_field.height();
  std::vector<int> ink(h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) ink[y] += binary_field.at(x, y) < 128;

  // Centred moving average; the window shrinks at the borders.
  const int half = params.smooth_window / 2;
  std::vector<double> density(h, 0.0);
  for (int y = 0; y < h; ++y) {
    const int lo = std::max(0, y - half), hi = std::min(h - 1, y + half);
    long sum = 0;
    for (int k = lo; k <= hi; ++k) sum += ink[k];
    density[y] = static_cast<double>(sum) / (static_cast<double>(w) * (hi - lo + 1));
  }

  std::vector<std::pair<int, int>> runs;
  for (int y = 0; y < h;) {
    if (!(density[y] > params.min_density)) {
      ++y;
      continue;
    }
    int end = y;
    while (end + 1 < h && density[end + 1] > params.min_density) ++end;
    if (!runs.empty() && y - runs.back().second - 1 < params.min_gap)
      runs.back().second = end;
    else
      runs.push_back({y, end});
    y = end + 1;
  }

  std::vector<LineBox> lines;
  for (const auto& [r0, r1] : runs) {
    int x0 = w, x1 = -1, y0 = h, y1 = -1;
    for (int y = r0; y <= r1; ++y)
      for (int x = 0; x < w; ++x)
        if (binary_field.at(x, y) < 128) {
          x0 = std::min(x0, x), x1 = std::max(x1, x);
          y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
    if (x1 < 0) continue;
    const int e = params.expand_px;
    lines.push_back({rect_quad(std::max(0, x0 - e), std::max(0, y0 - e), std::min(w, x1 + 1 + e),
                               std::min(h, y1 + 1 + e)),
                     1.0});
  }
  return lines;
}

}  // namespace invizo::segmentation
