#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "invizo/templates/template.hpp"

namespace invizo {

enum class RegistrationMode { Matched, Fallback };

std::string_view to_string(RegistrationMode mode) noexcept;

struct Prediction {
  std::string field_id;
  std::string raw_text;
  std::string enhanced_text;
  FieldType field_type = FieldType::SingleLine;
  RegistrationMode registration = RegistrationMode::Matched;
  std::vector<std::string> line_texts;
  // Error code names (EmptyAfterFilter, DateRejected, ...) recorded while
  // producing this prediction, with a message each.
  std::vector<std::string> flags;
  std::optional<std::string> error;
};

// Keeps Arabic-Indic and Western digits in order, Western mapped to
// Arabic-Indic. Throws EmptyAfterFilter when nothing is left.
std::string enhance_number(std::string_view raw);

// Accepts D?M?YYYY and YYYY?M?D with one of / - . used for both separators,
// one or two digits for day and month, surrounding whitespace ignored.
// Returns DD/MM/YYYY, in Arabic-Indic digits when the input had any.
// Throws DateRejected.
std::string enhance_date(std::string_view raw);

// Closest possibility by Levenshtein distance between normalized forms;
// ties go to the earliest. Returns the possibility as listed.
std::string enhance_defined(std::string_view raw, std::span<const std::string> possibilities);

// Fills enhanced_text from raw_text by field type. Failures leave
// enhanced_text = raw_text and append a flag.
Prediction enhance(Prediction pred, std::span<const std::string> possibilities = {});

}  // namespace invizo
