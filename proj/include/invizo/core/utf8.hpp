#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace invizo::utf8 {

// Decodes UTF-8 into Unicode scalar values. Malformed sequences decode to
// U+FFFD one byte at a time.
std::u32string decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view text);

// Splits into one UTF-8 string per scalar value.
std::vector<std::string> split_scalars(std::string_view text);

std::size_t length(std::string_view text);

// Whitespace-delimited tokens (ASCII whitespace and U+00A0).
std::vector<std::string> split_words(std::string_view text);

}  // namespace invizo::utf8
