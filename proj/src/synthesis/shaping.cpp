#include "invizo/synthesis/shaping.hpp"

#include <algorithm>
#include <vector>

namespace invizo::synthesis {
namespace {

enum class Joining { None, Right, Dual, Transparent };

struct Letter {
  char32_t base;
  char32_t isolated;  // first presentation form; others follow consecutively
  Joining joining;
};

// Presentation forms are laid out isolated, final, initial, medial.
constexpr Letter kLetters[] = {
    {U'ء', U'ﺀ', Joining::None},  {U'آ', U'ﺁ', Joining::Right},
    {U'أ', U'ﺃ', Joining::Right}, {U'ؤ', U'ﺅ', Joining::Right},
    {U'إ', U'ﺇ', Joining::Right}, {U'ئ', U'ﺉ', Joining::Dual},
    {U'ا', U'ﺍ', Joining::Right}, {U'ب', U'ﺏ', Joining::Dual},
    {U'ة', U'ﺓ', Joining::Right}, {U'ت', U'ﺕ', Joining::Dual},
    {U'ث', U'ﺙ', Joining::Dual},  {U'ج', U'ﺝ', Joining::Dual},
    {U'ح', U'ﺡ', Joining::Dual},  {U'خ', U'ﺥ', Joining::Dual},
    {U'د', U'ﺩ', Joining::Right}, {U'ذ', U'ﺫ', Joining::Right},
    {U'ر', U'ﺭ', Joining::Right}, {U'ز', U'ﺯ', Joining::Right},
    {U'س', U'ﺱ', Joining::Dual},  {U'ش', U'ﺵ', Joining::Dual},
    {U'ص', U'ﺹ', Joining::Dual},  {U'ض', U'ﺽ', Joining::Dual},
    {U'ط', U'ﻁ', Joining::Dual},  {U'ظ', U'ﻅ', Joining::Dual},
    {U'ع', U'ﻉ', Joining::Dual},  {U'غ', U'ﻍ', Joining::Dual},
    {U'ف', U'ﻑ', Joining::Dual},  {U'ق', U'ﻕ', Joining::Dual},
    {U'ك', U'ﻙ', Joining::Dual},  {U'ل', U'ﻝ', Joining::Dual},
    {U'م', U'ﻡ', Joining::Dual},  {U'ن', U'ﻥ', Joining::Dual},
    {U'ه', U'ﻩ', Joining::Dual},  {U'و', U'ﻭ', Joining::Right},
    {U'ى', U'ﻯ', Joining::Right}, {U'ي', U'ﻱ', Joining::Dual},
};

constexpr char32_t kTatweel = U'ـ';
constexpr char32_t kLam = U'ل';

const Letter* find_letter(char32_t c) {
  for (const Letter& l : kLetters)
    if (l.base == c) return &l;
  return nullptr;
}

Joining joining_of(char32_t c) {
  if (c == kTatweel) return Joining::Dual;
  if (c >= U'ً' && c <= U'ْ') return Joining::Transparent;
  if (const Letter* l = find_letter(c)) return l->joining;
  return Joining::None;
}

// Lam-alef ligature (isolated form) for the alef variant, or 0.
char32_t lam_alef(char32_t alef) {
  switch (alef) {
    case U'آ': return U'ﻵ';
    case U'أ': return U'ﻷ';
    case U'إ': return U'ﻹ';
    case U'ا': return U'ﻻ';
    default: return 0;
  }
}

std::ptrdiff_t neighbour(std::u32string_view s, std::size_t i, int step) {
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + step;
  while (j >= 0 && j < static_cast<std::ptrdiff_t>(s.size()) && joining_of(s[j]) == Joining::Transparent) j += step;
  return (j >= 0 && j < static_cast<std::ptrdiff_t>(s.size())) ? j : -1;
}

bool joins_previous(std::u32string_view s, std::size_t i) {
  const Joining self = joining_of(s[i]);
  if (self != Joining::Right && self != Joining::Dual) return false;
  const auto p = neighbour(s, i, -1);
  return p >= 0 && joining_of(s[p]) == Joining::Dual;
}

bool joins_next(std::u32string_view s, std::size_t i) {
  if (joining_of(s[i]) != Joining::Dual) return false;
  const auto n = neighbour(s, i, +1);
  if (n < 0) return false;
  const Joining j = joining_of(s[n]);
  return j == Joining::Right || j == Joining::Dual;
}

bool is_ltr(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= U'٠' && c <= U'٩') || (c >= U'۰' && c <= U'۹');
}

bool is_separator(char32_t c) { return c == U'.' || c == U',' || c == U'/' || c == U':' || c == U'٫' || c == U'٬'; }

}  // namespace

JoiningForm joining_form(std::u32string_view s, std::size_t i) {
  const bool prev = joins_previous(s, i);
  const bool next = joins_next(s, i);
  if (prev && next) return JoiningForm::Medial;
  if (prev) return JoiningForm::Final;
  if (next) return JoiningForm::Initial;
  return JoiningForm::Isolated;
}

std::u32string contextual_forms(std::u32string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    if (c == kLam) {
      const auto n = neighbour(s, i, +1);
      if (n == static_cast<std::ptrdiff_t>(i) + 1 && lam_alef(s[n]) != 0) {
        out += lam_alef(s[n]) + (joins_previous(s, i) ? 1 : 0);
        ++i;
        continue;
      }
    }
    const Letter* l = find_letter(c);
    if (!l) {
      out += c;
      continue;
    }
    out += l->isolated + static_cast<char32_t>(joining_form(s, i));
  }
  return out;
}

std::u32string visual_order(std::u32string_view s) {
  // Runs in logical order; a separator belongs to a digit run only when
  // digits sit on both sides.
  std::vector<std::pair<bool, std::u32string>> runs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool ltr = is_ltr(s[i]);
    if (!ltr && is_separator(s[i]) && i > 0 && i + 1 < s.size() && is_ltr(s[i - 1]) && is_ltr(s[i + 1])) ltr = true;
    if (runs.empty() || runs.back().first != ltr) runs.push_back({ltr, {}});
    runs.back().second += s[i];
  }
  std::u32string out;
  for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
    if (it->first)
      out += it->second;
    else
      out.append(it->second.rbegin(), it->second.rend());
  }
  return out;
}

std::u32string BasicArabicShaper::shape(std::u32string_view logical) const {
  return visual_order(contextual_forms(logical));
}

}  // namespace invizo::synthesis
