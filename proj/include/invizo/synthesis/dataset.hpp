#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "invizo/synthesis/augment.hpp"
#include "invizo/synthesis/compose.hpp"
#include "invizo/synthesis/font.hpp"

namespace invizo::synthesis {

struct ManifestEntry {
  std::filesystem::path image_path;
  std::string label;
};

// UTF-8 lines `image_path<TAB>label`. Relative paths are resolved against
// the manifest's directory on read and written relative to it.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

struct Split {
  std::vector<std::size_t> train, validation, test;
};

// Shuffles 0..n-1 and cuts it 7:2:2. Sets are disjoint and cover every id.
Split split_dataset(std::size_t n, std::uint64_t seed);

// Generated in memory, deterministic in `seed`.
std::vector<ComposedLine> digit_sequences(std::size_t count, std::uint64_t seed,
                                          const std::string& font_file = std::string(kDefaultFont),
                                          int glyph_px = 48);

// Words of each normalized line are rendered separately and composed right to
// left. Lines that normalize to nothing are skipped.
std::vector<ComposedLine> text_lines(const std::vector<std::string>& corpus,
                                     const std::string& font_file = std::string(kDefaultFont),
                                     int glyph_px = 48);

struct SynthOptions {
  std::filesystem::path out_dir;
  std::size_t digit_count = 0;
  std::vector<std::string> corpus;
  std::string font_file = std::string(kDefaultFont);
  std::uint64_t seed = 42;
  // Applied per sample with seed + index when set.
  std::optional<AugmentSpec> augment;
};

// Writes PNGs plus manifest.tsv, train.tsv, validation.tsv and test.tsv.
// Returns the number of samples written.
std::size_t write_dataset(const SynthOptions& options);

}  // namespace invizo::synthesis
