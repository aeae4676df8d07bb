#include "invizo/synthesis/font.hpp"

#include <opencv2/freetype.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <map>
#include <mutex>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/imaging/image_io.hpp"

namespace invizo::synthesis {
namespace {

constexpr int kMargin = 4;

std::uint32_t be(const std::vector<std::uint8_t>& b, std::size_t off, int bytes) {
  if (off + bytes > b.size()) fail(ErrorCode::Font, "font table runs past the end of the file");
  std::uint32_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | b[off + i];
  return v;
}

void read_format4(const std::vector<std::uint8_t>& b, std::size_t sub, std::unordered_set<char32_t>& out) {
  const std::uint32_t seg_x2 = be(b, sub + 6, 2);
  const std::size_t ends = sub + 14;
  const std::size_t starts = ends + seg_x2 + 2;
  const std::size_t deltas = starts + seg_x2;
  const std::size_t ranges = deltas + seg_x2;
  for (std::uint32_t s = 0; s < seg_x2 / 2; ++s) {
    const std::uint32_t end = be(b, ends + 2 * s, 2);
    const std::uint32_t start = be(b, starts + 2 * s, 2);
    const std::uint32_t delta = be(b, deltas + 2 * s, 2);
    const std::uint32_t range = be(b, ranges + 2 * s, 2);
    for (std::uint32_t c = start; c <= end && c != 0xFFFF; ++c) {
      std::uint32_t glyph;
      if (range == 0) {
        glyph = (c + delta) & 0xFFFF;
      } else {
        const std::size_t at = ranges + 2 * s + range + 2 * (c - start);
        glyph = be(b, at, 2);
        if (glyph != 0) glyph = (glyph + delta) & 0xFFFF;
      }
      if (glyph != 0) out.insert(c);
    }
  }
}

void read_format12(const std::vector<std::uint8_t>& b, std::size_t sub, std::unordered_set<char32_t>& out) {
  const std::uint32_t groups = be(b, sub + 12, 4);
  for (std::uint32_t g = 0; g < groups; ++g) {
    const std::size_t at = sub + 16 + 12 * static_cast<std::size_t>(g);
    const std::uint32_t start = be(b, at, 4), end = be(b, at + 4, 4), glyph = be(b, at + 8, 4);
    if (end < start || end - start > 0x10FFFF) fail(ErrorCode::Font, "bad cmap group");
    for (std::uint32_t c = start; c <= end; ++c)
      if (glyph + (c - start) != 0) out.insert(c);
  }
}

}  // namespace

std::unordered_set<char32_t> font_coverage(const std::filesystem::path& font_file) {
  std::vector<std::uint8_t> b;
  try {
    b = read_file(font_file);
  } catch (const Error&) {
    fail(ErrorCode::Font, "cannot read font '" + font_file.string() + "'");
  }
  try {
    const std::uint32_t tables = be(b, 4, 2);
    std::size_t cmap = 0;
    for (std::uint32_t t = 0; t < tables; ++t) {
      const std::size_t rec = 12 + 16 * static_cast<std::size_t>(t);
      if (be(b, rec, 4) == 0x636D6170) cmap = be(b, rec + 8, 4);  // 'cmap'
    }
    if (cmap == 0) fail(ErrorCode::Font, "font has no cmap table");
    std::unordered_set<char32_t> out;
    const std::uint32_t subtables = be(b, cmap + 2, 2);
    for (std::uint32_t s = 0; s < subtables; ++s) {
      const std::uint32_t platform = be(b, cmap + 4 + 8 * s, 2);
      const std::uint32_t encoding = be(b, cmap + 6 + 8 * s, 2);
      const std::size_t sub = cmap + be(b, cmap + 8 + 8 * s, 4);
      const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
      if (!unicode) continue;
      const std::uint32_t format = be(b, sub, 2);
      if (format == 4) read_format4(b, sub, out);
      if (format == 12) read_format12(b, sub, out);
    }
    if (out.empty()) fail(ErrorCode::Font, "font has no Unicode cmap");
    return out;
  } catch (const Error& e) {
    fail(ErrorCode::Font, "font '" + font_file.string() + "': " + e.what());
  }
}

struct FontRenderer::Impl {
  cv::Ptr<cv::freetype::FreeType2> ft;
  std::mutex lock;  // FreeType2 keeps per-call state
};

FontRenderer::FontRenderer(const std::filesystem::path& font_file) : impl_(std::make_unique<Impl>()) {
  coverage_ = font_coverage(font_file);
  try {
    impl_->ft = cv::freetype::createFreeType2();
    impl_->ft->loadFontData(font_file.string(), 0);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::Font, "cannot load font '" + font_file.string() + "': " + e.what());
  }
}

FontRenderer::~FontRenderer() = default;

RasterImage FontRenderer::render(std::string_view text, int px_height) const {
  static const BasicArabicShaper shaper;
  return render(text, px_height, shaper);
}

RasterImage FontRenderer::render(std::string_view text, int px_height, const Shaper& shaper,
                                 std::string_view vertical_reference) const {
  require(px_height >= 4, "px_height must be at least 4");
  const std::u32string logical = utf8::decode(text);
  if (logical.empty()) return RasterImage(2 * kMargin, px_height, 1, 255);
  const auto shaped = [&](std::string_view t) {
    const std::u32string visual = shaper.shape(utf8::decode(t));
    for (char32_t c : visual)
      if (c != U' ' && !covers(c)) fail(ErrorCode::Glyph, "font has no glyph for '" + utf8::encode(c) + "'");
    return utf8::encode(visual);
  };
  const std::string encoded = shaped(text);
  const std::string reference = vertical_reference.empty() ? std::string() : shaped(vertical_reference);

  std::lock_guard guard(impl_->lock);
  int baseline = 0;
  const cv::Size size = impl_->ft->getTextSize(encoded, px_height, -1, &baseline);
  int canvas_w = size.width + 4 * px_height + 2 * kMargin;
  if (!reference.empty())
    canvas_w = std::max(canvas_w, impl_->ft->getTextSize(reference, px_height, -1, &baseline).width + 4 * px_height + 2 * kMargin);
  const int canvas_h = 3 * px_height + 2 * kMargin;
  const auto draw = [&](const std::string& s) {
    cv::Mat canvas(canvas_h, canvas_w, CV_8UC3, cv::Scalar(255, 255, 255));
    impl_->ft->putText(canvas, s, cv::Point(2 * px_height, 2 * px_height), px_height, cv::Scalar(0, 0, 0), -1,
                       cv::LINE_AA, true);
    return canvas;
  };
  const cv::Mat canvas = draw(encoded);
  int x0 = canvas_w, y0 = canvas_h, x1 = -1, y1 = -1;
  for (int y = 0; y < canvas_h; ++y)
    for (int x = 0; x < canvas_w; ++x)
      if (canvas.at<cv::Vec3b>(y, x)[0] < 255) {
        x0 = std::min(x0, x), x1 = std::max(x1, x);
        y0 = std::min(y0, y), y1 = std::max(y1, y);
      }
  if (x1 < 0) return RasterImage(2 * kMargin, px_height, 1, 255);
  if (!reference.empty()) {
    // Rows span the reference's ink too, so glyphs rendered separately keep
    // their relative size and baseline.
    const cv::Mat ref = draw(reference);
    for (int y = 0; y < canvas_h; ++y)
      for (int x = 0; x < canvas_w; ++x)
        if (ref.at<cv::Vec3b>(y, x)[0] < 255) {
          y0 = std::min(y0, y), y1 = std::max(y1, y);
          break;
        }
  }
  RasterImage out(x1 - x0 + 1 + 2 * kMargin, y1 - y0 + 1 + 2 * kMargin, 1, 255);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) out.at(x - x0 + kMargin, y - y0 + kMargin) = canvas.at<cv::Vec3b>(y, x)[0];
  return out;
}

RasterImage render_line(std::string_view text, const std::filesystem::path& font_file, int px_height,
                        std::string_view vertical_reference) {
  static std::mutex cache_lock;
  static std::map<std::filesystem::path, std::shared_ptr<FontRenderer>> cache;
  std::shared_ptr<FontRenderer> renderer;
  {
    std::lock_guard guard(cache_lock);
    auto& slot = cache[font_file];
    if (!slot) {
      try {
        slot = std::make_shared<FontRenderer>(font_file);
      } catch (...) {
        cache.erase(font_file);
        throw;
      }
    }
    renderer = slot;
  }
  static const BasicArabicShaper shaper;
  return renderer->render(text, px_height, shaper, vertical_reference);
}

}  // namespace invizo::synthesis
