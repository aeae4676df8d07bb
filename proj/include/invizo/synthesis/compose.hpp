#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "invizo/imaging/raster.hpp"

namespace invizo::synthesis {

inline constexpr int kLineWidth = 1024;
inline constexpr int kLineHeight = 64;

// Scales every word to `height` (aspect kept) and places them right to left:
// words[0] is rightmost. The line is then fitted onto the canvas
// (fit_line_canvas): left-padded when short, scaled down and vertically
// centred when long. Output is single channel.
RasterImage compose_line(std::span<const RasterImage> words, int height = kLineHeight, int width = kLineWidth);

struct LabeledGlyph {
  RasterImage image;
  std::string label;  // UTF-8, one digit
};

struct ComposedLine {
  RasterImage image;
  std::string label;  // logical order
};

// Draws n digits (index = rng() % size) and composes them so the first
// drawn digit is leftmost, as numbers are displayed left to right inside
// Arabic text; the label lists them in that same order.
ComposedLine compose_digit_sequence(std::span<const LabeledGlyph> digits, int n, std::mt19937_64& rng);

// Renders the ten Arabic-Indic digits with the given font.
std::vector<LabeledGlyph> render_digit_glyphs(const std::string& font_file, int px_height);

}  // namespace invizo::synthesis
