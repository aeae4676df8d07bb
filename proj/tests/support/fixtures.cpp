#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "invizo/core/utf8.hpp"
#include "invizo/imaging/color.hpp"
#include "invizo/recognizer/optimizer.hpp"
#include "invizo/synthesis/charset.hpp"
#include "invizo/synthesis/dataset.hpp"
#include "invizo/synthesis/font.hpp"

namespace fs = std::filesystem;

namespace invizo::testing {
namespace {

void paste(RasterImage& dst, const RasterImage& src, int x0, int y0) {
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x)
      if (dst.contains(x0 + x, y0 + y)) dst.at(x0 + x, y0 + y) = std::min(dst.at(x0 + x, y0 + y), src.at(x, y));
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
  return c;
}

// Words scaled to `height` and laid right to left, no canvas fitting.
RasterImage strip(const std::vector<RasterImage>& words, int height) {
  std::vector<RasterImage> scaled;
  int total = 0;
  for (const auto& w : words) {
    const int sw = std::max(1, static_cast<int>(std::lround(static_cast<double>(w.width()) * height / w.height())));
    scaled.push_back(resize(w, sw, height));
    total += sw;
  }
  RasterImage out(total, height, 1, 255);
  int x = total;
  for (const auto& w : scaled) {
    x -= w.width();
    paste(out, w, x, 0);
  }
  return out;
}

}  // namespace

RasterImage textured_page(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto uni = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  RasterImage page(width, height, 1, 255);
  const int shapes = width * height / 4000;
  for (int s = 0; s < shapes; ++s) {
    const int v = uni(0, 170);
    const int cx = uni(0, width - 1), cy = uni(0, height - 1);
    const int rx = uni(3, 18), ry = uni(3, 18);
    const bool disk = rng() & 1;
    for (int y = cy - ry; y <= cy + ry; ++y)
      for (int x = cx - rx; x <= cx + rx; ++x) {
        if (!page.contains(x, y)) continue;
        if (disk) {
          const double dx = (x - cx) / static_cast<double>(rx), dy = (y - cy) / static_cast<double>(ry);
          if (dx * dx + dy * dy > 1.0) continue;
        }
        page.at(x, y) = static_cast<std::uint8_t>(std::min<int>(page.at(x, y), v));
      }
  }
  const char* words[] = {"بطاقة", "رقم", "تاريخ", "الاسم", "٢٠٢٣", "مدفوع", "العنوان"};
  for (int i = 0; i < 6; ++i) {
    const RasterImage w = synthesis::render_line(words[rng() % 7], std::string(synthesis::kDefaultFont), uni(18, 30));
    paste(page, w, uni(0, std::max(0, width - w.width())), uni(0, std::max(0, height - w.height())));
  }
  return page;
}

Mat3 integer_grid(const registration::Homography& h) {
  const Mat3 to_centre = {1, 0, 0.5, 0, 1, 0.5, 0, 0, 1};
  const Mat3 from_centre = {1, 0, -0.5, 0, 1, -0.5, 0, 0, 1};
  return mul(from_centre, mul(h.matrix(), to_centre));
}

RasterImage warp_by(const RasterImage& img, const registration::Homography& h, int out_w, int out_h) {
  return warp_perspective(img, integer_grid(h.inverse()), out_w, out_h, 255);
}

registration::Homography random_homography(std::mt19937_64& rng, int w, int h, double max_deg) {
  const auto uni = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double a = uni(-max_deg, max_deg) * std::numbers::pi / 180.0;
  const double s = uni(0.9, 1.1);
  const double cx = w * 0.5, cy = h * 0.5;
  const double tx = uni(-0.05, 0.05) * w, ty = uni(-0.05, 0.05) * h;
  const Mat3 centre = {1, 0, -cx, 0, 1, -cy, 0, 0, 1};
  const Mat3 rot = {s * std::cos(a), -s * std::sin(a), 0, s * std::sin(a), s * std::cos(a), 0, 0, 0, 1};
  // Tilt small enough that no page corner approaches the horizon.
  const Mat3 tilt = {1, 0, 0, 0, 1, 0, uni(-2e-4, 2e-4), uni(-2e-4, 2e-4), 1};
  const Mat3 back = {1, 0, cx + tx, 0, 1, cy + ty, 0, 0, 1};
  return registration::Homography(mul(back, mul(tilt, mul(rot, centre))));
}

fs::path temp_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  const fs::path dir = fs::temp_directory_path() / ("invizo-" + name + "-" + std::to_string(rng() % 1000000000));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nn::ModelConfig toy_config() {
  nn::ModelConfig c;
  c.d_model = 64;
  c.enc_layers = 1;
  c.dec_layers = 1;
  c.heads = 4;
  c.ff_dim = 128;
  c.dropout = 0.0;
  c.batch = 16;
  c.lr = 1e-3;
  c.input_channels = 1;
  c.conv_channels = {4, 8, 16};
  c.max_len = 256;
  return c;
}

TrainedModel train_model(const std::vector<synthesis::ComposedLine>& lines, int steps, std::uint64_t seed) {
  TrainedModel out;
  out.vocab = nn::Vocabulary(synthesis::Charset::default_set().characters());
  nn::ModelConfig config = toy_config();
  config.seed = seed;
  auto model = std::make_shared<nn::Recognizer>(config, out.vocab.size());
  std::vector<nn::TrainingSample> samples;
  for (const auto& l : lines) samples.push_back({l.image, l.label});
  nn::AdamW opt = nn::make_optimizer(*model);
  nn::TrainOptions o;
  o.steps = steps;
  o.batch = config.batch;
  o.seed = seed;
  nn::train(*model, opt, samples, out.vocab, o);
  out.model = std::move(model);
  return out;
}

const TrainedModel& cached_digit_model() {
  static std::once_flag once;
  static TrainedModel model;
  std::call_once(once, [] { model = train_model(synthesis::digit_sequences(64, 42), 300); });
  return model;
}

pipeline::ModelSnapshot snapshot(const TrainedModel& m) { return {m.model, m.vocab}; }

FormFixture digit_form(std::uint64_t seed, std::vector<std::string> texts) {
  std::mt19937_64 rng(seed);
  const auto glyphs = synthesis::render_digit_glyphs(std::string(synthesis::kDefaultFont), 48);
  const int w = 640, h = 420;
  RasterImage page = textured_page(w, h, seed ^ 0x5eedULL);
  if (texts.empty())
    for (int i = 0; i < 3; ++i) {
      std::string t;
      const int n = 2 + static_cast<int>(rng() % 4);
      for (int k = 0; k < n; ++k) t += glyphs[rng() % glyphs.size()].label;
      texts.push_back(t);
    }
  FormFixture f;
  std::vector<FieldShape> shapes;
  const int line_h = 40, margin = 6;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    // Glyphs in reverse so the first digit ends up leftmost.
    std::vector<RasterImage> words;
    const auto scalars = utf8::split_scalars(texts[i]);
    for (auto it = scalars.rbegin(); it != scalars.rend(); ++it)
      for (const auto& g : glyphs)
        if (g.label == *it) words.push_back(g.image);
    const RasterImage s = strip(words, line_h);
    const int y0 = 50 + static_cast<int>(i) * 120;
    const int x0 = w - 80 - s.width();
    for (int y = y0 - 2 * margin; y < y0 + line_h + 2 * margin; ++y)
      for (int x = x0 - 2 * margin; x < x0 + s.width() + 2 * margin; ++x)
        if (page.contains(x, y)) page.at(x, y) = 255;
    paste(page, s, x0, y0);
    FieldShape shape;
    shape.id = "field_" + std::to_string(i);
    shape.type = FieldType::Number;
    shape.points = rect_quad(x0 - margin, y0 - margin, x0 + s.width() + margin, y0 + line_h + margin);
    shapes.push_back(shape);
  }
  f.tmpl = make_template(std::move(shapes), std::move(page));
  f.texts = std::move(texts);
  return f;
}

}  // namespace invizo::testing
