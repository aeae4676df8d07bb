#include "invizo/recognizer/vocabulary.hpp"

#include <fstream>
#include <sstream>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"

namespace invizo::nn {
namespace {

constexpr const char* kSpecialNames[] = {"<pad>", "<sos>", "<eos>"};

}  // namespace

Vocabulary::Vocabulary() : tokens_(std::begin(kSpecialNames), std::end(kSpecialNames)) {}

Vocabulary::Vocabulary(std::u32string_view characters) : Vocabulary() {
  for (char32_t c : characters) {
    require(c != U'\n' && c != U'\r', "newline cannot be a vocabulary token");
    require(!index_.contains(c), "duplicate vocabulary character '" + utf8::encode(c) + "'");
    index_[c] = size();
    tokens_.push_back(utf8::encode(c));
  }
}

std::optional<int> Vocabulary::id(char32_t c) const {
  const auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  for (char32_t c : utf8::decode(text)) {
    const auto i = id(c);
    if (!i) fail(ErrorCode::Parameter, "character '" + utf8::encode(c) + "' is not in the vocabulary");
    ids.push_back(*i);
  }
  return ids;
}

std::string Vocabulary::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int i : ids)
    if (i >= kSpecials && i < size()) out += tokens_[i];
  return out;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open vocabulary '" + path.string() + "'");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.size() < kSpecials) fail(ErrorCode::Schema, "vocabulary '" + path.string() + "' lacks the special tokens");
  for (int i = 0; i < kSpecials; ++i)
    if (lines[i] != kSpecialNames[i])
      fail(ErrorCode::Schema, "vocabulary line " + std::to_string(i + 1) + " must be " + kSpecialNames[i]);
  std::u32string chars;
  for (std::size_t i = kSpecials; i < lines.size(); ++i) {
    const auto scalars = utf8::decode(lines[i]);
    if (scalars.size() != 1)
      fail(ErrorCode::Schema, "vocabulary line " + std::to_string(i + 1) + " must hold exactly one character");
    chars += scalars[0];
  }
  return Vocabulary(chars);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write vocabulary '" + path.string() + "'");
  for (const auto& t : tokens_) out << t << '\n';
}

}  // namespace invizo::nn
