#include "invizo/enhancement/enhance.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/enhancement/levenshtein.hpp"
#include "invizo/synthesis/charset.hpp"

namespace invizo {
namespace {

using synthesis::is_arabic_indic_digit;
using synthesis::is_western_digit;

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U' '; }

[[noreturn]] void reject(std::string_view raw, const char* why) {
  fail(ErrorCode::DateRejected, "'" + std::string(raw) + "' is not a date: " + why);
}

struct Group {
  int value = 0;
  std::size_t digits = 0;
};

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int m, int y) {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::string_view to_string(RegistrationMode mode) noexcept {
  return mode == RegistrationMode::Matched ? "matched" : "fallback";
}

std::string enhance_number(std::string_view raw) {
  std::u32string out;
  for (char32_t c : utf8::decode(raw)) {
    if (is_arabic_indic_digit(c)) out += c;
    else if (is_western_digit(c)) out += synthesis::to_arabic_indic(c);
  }
  if (out.empty()) fail(ErrorCode::EmptyAfterFilter, "no digits in '" + std::string(raw) + "'");
  return utf8::encode(out);
}

std::string enhance_date(std::string_view raw) {
  std::u32string s = utf8::decode(raw);
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();

  bool arabic = false;
  std::vector<Group> groups(1);
  std::vector<char32_t> seps;
  for (char32_t c : s) {
    int d = -1;
    if (is_western_digit(c)) d = static_cast<int>(c - U'0');
    else if (is_arabic_indic_digit(c)) {
      d = static_cast<int>(c - U'٠');
      arabic = true;
    }
    if (d >= 0) {
      if (++groups.back().digits > 4) reject(raw, "digit group too long");
      groups.back().value = groups.back().value * 10 + d;
    } else if (c == U'/' || c == U'-' || c == U'.') {
      if (groups.back().digits == 0) reject(raw, "empty digit group");
      seps.push_back(c);
      groups.emplace_back();
    } else {
      reject(raw, "unexpected character");
    }
  }
  if (groups.size() != 3 || groups.back().digits == 0) reject(raw, "expected three digit groups");
  if (seps[0] != seps[1]) reject(raw, "mixed separators");

  int day, month, year;
  if (groups[0].digits == 4 && groups[1].digits <= 2 && groups[2].digits <= 2) {
    year = groups[0].value, month = groups[1].value, day = groups[2].value;
  } else if (groups[2].digits == 4 && groups[0].digits <= 2 && groups[1].digits <= 2) {
    day = groups[0].value, month = groups[1].value, year = groups[2].value;
  } else {
    reject(raw, "expected DD?MM?YYYY or YYYY?MM?DD");
  }
  if (year < 1) reject(raw, "year out of range");
  if (month < 1 || month > 12) reject(raw, "month out of range");
  if (day < 1 || day > days_in_month(month, year)) reject(raw, "day out of range for month");

  char buf[40];
  std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", day, month, year);
  std::u32string out = utf8::decode(buf);
  if (arabic)
    for (char32_t& c : out)
      if (is_western_digit(c)) c = synthesis::to_arabic_indic(c);
  return utf8::encode(out);
}

std::string enhance_defined(std::string_view raw, std::span<const std::string> possibilities) {
  require(!possibilities.empty(), "defined label needs at least one possibility");
  const std::u32string r = utf8::decode(synthesis::normalize_corpus(raw));
  std::size_t best = 0;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < possibilities.size(); ++i) {
    const std::size_t d = levenshtein(r, utf8::decode(synthesis::normalize_corpus(possibilities[i])));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return possibilities[best];
}

Prediction enhance(Prediction pred, std::span<const std::string> possibilities) {
  pred.enhanced_text = pred.raw_text;
  try {
    switch (pred.field_type) {
      case FieldType::Number:
        pred.enhanced_text = enhance_number(pred.raw_text);
        break;
      case FieldType::Date:
        pred.enhanced_text = enhance_date(pred.raw_text);
        break;
      case FieldType::DefinedLabel:
        pred.enhanced_text = enhance_defined(pred.raw_text, possibilities);
        break;
      case FieldType::SingleLine:
      case FieldType::MultipleLines:
        break;
    }
  } catch (const Error& e) {
    pred.enhanced_text = pred.raw_text;
    const std::string flag(to_string(e.code()));
    if (std::find(pred.flags.begin(), pred.flags.end(), flag) == pred.flags.end()) pred.flags.push_back(flag);
    if (!pred.error) pred.error = e.what();
  }
  return pred;
}

}  // namespace invizo
