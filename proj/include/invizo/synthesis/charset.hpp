#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

namespace invizo::synthesis {

// Ordered set of allowed characters.
class Charset {
 public:
  Charset() = default;
  // Duplicates are rejected with ParameterError.
  explicit Charset(std::u32string_view characters);

  // Every scalar of the UTF-8 file except line breaks is an entry.
  static Charset load(const std::filesystem::path& path);
  // Arabic letters, Arabic-Indic digits, space and punctuation: 64 entries.
  static const Charset& default_set();

  bool contains(char32_t c) const { return members_.contains(c); }
  const std::u32string& characters() const noexcept { return chars_; }
  std::size_t size() const noexcept { return chars_.size(); }

 private:
  std::u32string chars_;
  std::unordered_set<char32_t> members_;
};

// In order: Western digits to Arabic-Indic, Latin letters removed, the eight
// harakat (U+064B..U+0652) removed, characters outside the charset removed
// (space kept), whitespace runs collapsed to one space and trimmed.
std::string normalize_corpus(std::string_view text, const Charset& charset = Charset::default_set());

bool is_arabic_indic_digit(char32_t c) noexcept;
bool is_western_digit(char32_t c) noexcept;
char32_t to_arabic_indic(char32_t western) noexcept;

}  // namespace invizo::synthesis
