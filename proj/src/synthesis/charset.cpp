#include "invizo/synthesis/charset.hpp"

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/imaging/image_io.hpp"

namespace invizo::synthesis {

Charset::Charset(std::u32string_view characters) {
  for (char32_t c : characters) {
    require(members_.insert(c).second, "duplicate charset entry '" + utf8::encode(c) + "'");
    chars_ += c;
  }
}

Charset Charset::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::u32string chars;
  for (char32_t c : utf8::decode(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())))
    if (c != U'\n' && c != U'\r') chars += c;
  return Charset(chars);
}

const Charset& Charset::default_set() {
  static const Charset set(
      U"ءآأؤإئابةتثجحخدذرزسشصضطظعغفقكلمنهوىي"
      U"٠١٢٣٤٥٦٧٨٩"
      U" .،؛؟!:-/()«»%٪+\"'");
  return set;
}

bool is_arabic_indic_digit(char32_t c) noexcept { return c >= U'٠' && c <= U'٩'; }
bool is_western_digit(char32_t c) noexcept { return c >= U'0' && c <= U'9'; }
char32_t to_arabic_indic(char32_t western) noexcept { return U'٠' + (western - U'0'); }

namespace {

bool is_latin_letter(char32_t c) noexcept {
  return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z') ||
         (c >= U'À' && c <= U'ɏ' && c != U'×' && c != U'÷');
}

bool is_harakah(char32_t c) noexcept { return c >= U'ً' && c <= U'ْ'; }

bool is_space(char32_t c) noexcept {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' || c == U' ';
}

}  // namespace

std::string normalize_corpus(std::string_view text, const Charset& charset) {
  std::u32string out;
  for (char32_t c : utf8::decode(text)) {
    if (is_western_digit(c)) c = to_arabic_indic(c);
    if (is_latin_letter(c) || is_harakah(c)) continue;
    if (is_space(c)) {
      if (!out.empty() && out.back() != U' ') out += U' ';
      continue;
    }
    if (!charset.contains(c)) continue;
    out += c;
  }
  // Deleting characters can leave double spaces behind.
  std::u32string collapsed;
  for (char32_t c : out)
    if (!(c == U' ' && (collapsed.empty() || collapsed.back() == U' '))) collapsed += c;
  while (!collapsed.empty() && collapsed.back() == U' ') collapsed.pop_back();
  return utf8::encode(collapsed);
}

}  // namespace invizo::synthesis
