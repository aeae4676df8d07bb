#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/enhancement/levenshtein.hpp"
#include "invizo/metrics/metrics.hpp"

namespace invizo::metrics {

double cer(std::string_view reference, std::string_view hypothesis) {
  const std::u32string r = utf8::decode(reference);
  require(!r.empty(), "CER needs a non-empty reference");
  return static_cast<double>(levenshtein(r, utf8::decode(hypothesis))) / static_cast<double>(r.size());
}

double wer(std::string_view reference, std::string_view hypothesis) {
  const auto r = utf8::split_words(reference);
  require(!r.empty(), "WER needs a reference with at least one word");
  const auto h = utf8::split_words(hypothesis);
  return static_cast<double>(edit_distance<std::string>(r, h)) / static_cast<double>(r.size());
}

}  // namespace invizo::metrics
