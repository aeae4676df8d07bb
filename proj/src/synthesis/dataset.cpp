#include "invizo/synthesis/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/imaging/image_io.hpp"
#include "invizo/synthesis/charset.hpp"
#include "invizo/synthesis/font.hpp"

namespace fs = std::filesystem;

namespace invizo::synthesis {

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      fail(ErrorCode::Schema, path.string() + ":" + std::to_string(number) + ": expected image_path<TAB>label");
    fs::path image = line.substr(0, tab);
    if (image.is_relative()) image = base / image;
    out.push_back({image, line.substr(tab + 1)});
  }
  return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write manifest " + path.string());
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  for (const auto& e : entries) {
    require(e.label.find_first_of("\t\n") == std::string::npos, "labels may not contain tabs or newlines");
    fs::path p = e.image_path;
    if (p.is_absolute()) {
      const fs::path rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << p.generic_string() << '\t' << e.label << '\n';
  }
}

Split split_dataset(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  std::mt19937_64 rng(seed);
  // Fisher-Yates with modulo draws, same on every standard library.
  for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng() % i]);
  const std::size_t n_train = n * 7 / 11;
  const std::size_t n_val = n * 2 / 11;
  Split s;
  s.train.assign(ids.begin(), ids.begin() + n_train);
  s.validation.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  s.test.assign(ids.begin() + n_train + n_val, ids.end());
  return s;
}

std::vector<ComposedLine> digit_sequences(std::size_t count, std::uint64_t seed, const std::string& font_file,
                                          int glyph_px) {
  const auto glyphs = render_digit_glyphs(font_file, glyph_px);
  std::mt19937_64 rng(seed);
  std::vector<ComposedLine> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int n = 1 + static_cast<int>(rng() % 8);
    out.push_back(compose_digit_sequence(glyphs, n, rng));
  }
  return out;
}

std::vector<ComposedLine> text_lines(const std::vector<std::string>& corpus, const std::string& font_file,
                                     int glyph_px) {
  std::vector<ComposedLine> out;
  for (const std::string& raw : corpus) {
    const std::string line = normalize_corpus(raw);
    if (line.empty()) continue;
    std::vector<RasterImage> words;
    for (const std::string& w : utf8::split_words(line)) {
      // Word images are tight crops; pad them so composed words keep a gap.
      const RasterImage ink = render_line(w, font_file, glyph_px, line);
      const int pad = glyph_px / 6;
      words.push_back(crop(ink, -pad, 0, ink.width() + 2 * pad, ink.height(), 255));
    }
    out.push_back({compose_line(words), line});
  }
  return out;
}

std::size_t write_dataset(const SynthOptions& options) {
  require(!options.out_dir.empty(), "output directory is required");
  fs::create_directories(options.out_dir / "images");
  std::vector<ComposedLine> samples = digit_sequences(options.digit_count, options.seed, options.font_file);
  for (auto& l : text_lines(options.corpus, options.font_file)) samples.push_back(std::move(l));

  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    RasterImage img = samples[i].image;
    if (options.augment) {
      AugmentSpec spec = *options.augment;
      spec.seed = options.augment->seed + i;
      img = augment(img, spec);
    }
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.png", i);
    const fs::path p = options.out_dir / "images" / name;
    write_image(p, img);
    entries.push_back({p, samples[i].label});
  }
  write_manifest(options.out_dir / "manifest.tsv", entries);
  const Split split = split_dataset(entries.size(), options.seed);
  const auto subset = [&](const std::vector<std::size_t>& ids) {
    std::vector<ManifestEntry> v;
    for (std::size_t id : ids) v.push_back(entries[id]);
    return v;
  };
  write_manifest(options.out_dir / "train.tsv", subset(split.train));
  write_manifest(options.out_dir / "validation.tsv", subset(split.validation));
  write_manifest(options.out_dir / "test.tsv", subset(split.test));
  return entries.size();
}

}  // namespace invizo::synthesis
