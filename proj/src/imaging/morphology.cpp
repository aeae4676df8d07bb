#include "invizo/imaging/morphology.hpp"

#include <algorithm>

#include "invizo/core/error.hpp"

namespace invizo {
namespace {

// Separable 3-tap min/max over clamped indices (clamping repeats an
// in-bounds neighbour, which never changes a min or max).
template <typename Pick>
RasterImage rank3x3(const RasterImage& img, Pick pick) {
  require(img.channels() == 1, "morphology expects a single-channel image");
  const int w = img.width();
  const int h = img.height();
  RasterImage horizontal(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      horizontal.at(x, y) =
          pick(pick(img.at(std::max(x - 1, 0), y), img.at(x, y)), img.at(std::min(x + 1, w - 1), y));
  RasterImage out(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(x, y) = pick(pick(horizontal.at(x, std::max(y - 1, 0)), horizontal.at(x, y)),
                          horizontal.at(x, std::min(y + 1, h - 1)));
  return out;
}

}  // namespace

RasterImage erode(const RasterImage& binary) {
  return rank3x3(binary, [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); });
}

RasterImage dilate(const RasterImage& binary) {
  return rank3x3(binary, [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); });
}

RasterImage open(const RasterImage& binary) { return dilate(erode(binary)); }

}  // namespace invizo
