#pragma once

#include <filesystem>
#include <memory>
#include <string_view>
#include <unordered_set>

#include "invizo/imaging/raster.hpp"
#include "invizo/synthesis/shaping.hpp"

namespace invizo::synthesis {

inline constexpr std::string_view kDefaultFont = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf";

// Code points mapped by a TrueType/OpenType font's cmap (formats 4 and 12).
// Throws FontError when the file is missing or has no usable cmap.
std::unordered_set<char32_t> font_coverage(const std::filesystem::path& font_file);

class FontRenderer {
 public:
  // Throws FontError when the file cannot be loaded.
  explicit FontRenderer(const std::filesystem::path& font_file);
  ~FontRenderer();
  FontRenderer(const FontRenderer&) = delete;
  FontRenderer& operator=(const FontRenderer&) = delete;

  bool covers(char32_t c) const { return coverage_.contains(c); }

  // Shapes logical UTF-8 text, rasterizes it at `px_height` (ink 0 on 255,
  // single channel) and crops to the ink plus a 4 px margin. Empty text
  // gives an 8 x px_height blank. Throws GlyphError naming any character
  // the font lacks. Safe to call from several threads. With a
  // vertical_reference, the crop rows also cover that text's ink, which keeps
  // separately rendered pieces on a common baseline and scale.
  RasterImage render(std::string_view text, int px_height, const Shaper& shaper,
                     std::string_view vertical_reference = {}) const;
  RasterImage render(std::string_view text, int px_height) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::unordered_set<char32_t> coverage_;
};

// Convenience wrapper around a cached renderer per font path.
RasterImage render_line(std::string_view text, const std::filesystem::path& font_file, int px_height,
                        std::string_view vertical_reference = {});

}  // namespace invizo::synthesis
