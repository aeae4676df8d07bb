#include "invizo/synthesis/compose.hpp"

#include <algorithm>
#include <cmath>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/imaging/color.hpp"
#include "invizo/imaging/resample.hpp"
#include "invizo/synthesis/font.hpp"

namespace invizo::synthesis {

RasterImage compose_line(std::span<const RasterImage> words, int height, int width) {
  require(!words.empty(), "compose_line needs at least one word image");
  require(height >= 1 && width >= 1, "line canvas must be at least 1x1");
  std::vector<RasterImage> scaled;
  int total = 0;
  for (const RasterImage& w : words) {
    require(!w.empty(), "word image is empty");
    const int sw = std::max(1, static_cast<int>(std::lround(static_cast<double>(w.width()) * height / w.height())));
    scaled.push_back(resize(to_grayscale(w), sw, height));
    total += sw;
  }
  RasterImage strip(total, height, 1, 255);
  int x = total;
  for (const RasterImage& w : scaled) {
    x -= w.width();
    for (int y = 0; y < height; ++y)
      std::copy(w.row(y).begin(), w.row(y).end(), strip.data().begin() + static_cast<std::size_t>(y) * total + x);
  }
  return fit_line_canvas(strip, width, height);
}

ComposedLine compose_digit_sequence(std::span<const LabeledGlyph> digits, int n, std::mt19937_64& rng) {
  require(n >= 1 && n <= 8, "digit sequences hold 1 to 8 digits");
  require(!digits.empty(), "no digit glyphs to compose");
  std::vector<std::size_t> picks(n);
  for (int i = 0; i < n; ++i) picks[i] = static_cast<std::size_t>(rng() % digits.size());
  ComposedLine out;
  std::vector<RasterImage> words;
  for (std::size_t p : picks) out.label += digits[p].label;
  // compose_line places its first word rightmost.
  for (auto it = picks.rbegin(); it != picks.rend(); ++it) words.push_back(digits[*it].image);
  out.image = compose_line(words);
  return out;
}

std::vector<LabeledGlyph> render_digit_glyphs(const std::string& font_file, int px_height) {
  std::vector<LabeledGlyph> out;
  const std::string all = "٠١٢٣٤٥٦٧٨٩";
  for (char32_t c = U'٠'; c <= U'٩'; ++c) {
    const std::string label = utf8::encode(c);
    out.push_back({render_line(label, font_file, px_height, all), label});
  }
  return out;
}

}  // namespace invizo::synthesis
