#include "invizo/enhancement/levenshtein.hpp"

#include "invizo/core/utf8.hpp"

namespace invizo {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  return edit_distance<char32_t>(std::span(a.data(), a.size()), std::span(b.data(), b.size()));
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(std::u32string_view(utf8::decode(a)), std::u32string_view(utf8::decode(b)));
}

}  // namespace invizo
