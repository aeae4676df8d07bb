#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace invizo::nn {

// Character vocabulary; ids 0..2 are the specials.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kSos = 1;
  static constexpr int kEos = 2;
  static constexpr int kSpecials = 3;

  Vocabulary();
  // One token per Unicode scalar of `characters`; duplicates rejected.
  explicit Vocabulary(std::u32string_view characters);

  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::optional<int> id(char32_t c) const;

  // Throws ParameterError naming the first character outside the vocabulary.
  std::vector<int> encode(std::string_view utf8) const;
  // Specials are dropped.
  std::string decode(const std::vector<int>& ids) const;
  bool is_special(int id) const noexcept { return id >= 0 && id < kSpecials; }

  // One token per line, UTF-8, specials first as <pad>, <sos>, <eos>.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<char32_t, int> index_;
};

}  // namespace invizo::nn
