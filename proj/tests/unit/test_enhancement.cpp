#include <doctest.h>

#include <random>

#include "invizo/core/error.hpp"
#include "invizo/enhancement/enhance.hpp"
#include "invizo/enhancement/levenshtein.hpp"
#include "support/oracles.hpp"

using namespace invizo;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no throw");
  return ErrorCode::Parameter;
}

}  // namespace

TEST_CASE("levenshtein basics") {
  CHECK(levenshtein("", "") == 0);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("بطاقة", "بطاقه") == 1);
  CHECK(levenshtein("٤٢", "") == 2);
  CHECK(levenshtein(U"abc", U"cab") == 2);
}

TEST_CASE("levenshtein matches the full table on random strings") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    std::u32string a, b;
    for (int k = rng() % 12; k > 0; --k) a += static_cast<char32_t>(U'ا' + rng() % 5);
    for (int k = rng() % 12; k > 0; --k) b += static_cast<char32_t>(U'ا' + rng() % 5);
    CHECK(levenshtein(a, b) == oracle::edit_distance_table(a, b));
  }
}

TEST_CASE("number enhancement") {
  CHECK(enhance_number("١٢٣") == "١٢٣");
  CHECK(enhance_number("رقم 4٥6") == "٤٥٦");
  CHECK(enhance_number(" 0 ") == "٠");
  CHECK(code_of([] { enhance_number("بطاقة"); }) == ErrorCode::EmptyAfterFilter);
  CHECK(code_of([] { enhance_number(""); }) == ErrorCode::EmptyAfterFilter);
}

TEST_CASE("date enhancement") {
  CHECK(enhance_date("5/3/2021") == "05/03/2021");
  CHECK(enhance_date(" 2021-03-05 ") == "05/03/2021");
  CHECK(enhance_date("29.02.2024") == "29/02/2024");
  CHECK(enhance_date("٢٩/٠٢/٢٠٢٤") == "٢٩/٠٢/٢٠٢٤");
  CHECK(code_of([] { enhance_date("29/02/2023"); }) == ErrorCode::DateRejected);
  CHECK(code_of([] { enhance_date("5/3-2021"); }) == ErrorCode::DateRejected);
  CHECK(code_of([] { enhance_date("05/13/2021"); }) == ErrorCode::DateRejected);
  CHECK(code_of([] { enhance_date("005/03/2021"); }) == ErrorCode::DateRejected);
  CHECK(code_of([] { enhance_date("5/3/21"); }) == ErrorCode::DateRejected);
  CHECK(code_of([] { enhance_date("اليوم"); }) == ErrorCode::DateRejected);
}

TEST_CASE("defined label picks the nearest possibility") {
  const std::vector<std::string> opts = {"ذكر", "أنثى", "غير محدد"};
  CHECK(enhance_defined("ذكر", opts) == "ذكر");
  CHECK(enhance_defined("دكر", opts) == "ذكر");
  CHECK(enhance_defined("انثى", opts) == "أنثى");
  CHECK(enhance_defined("غيرمحدد", opts) == "غير محدد");
  // equal distance: the first listed wins
  const std::vector<std::string> tie = {"اب", "اد"};
  CHECK(enhance_defined("اج", tie) == "اب");
  CHECK_THROWS_AS(enhance_defined("x", {}), Error);
}

TEST_CASE("enhance dispatches on field type and flags failures") {
  Prediction p;
  p.field_id = "n";
  p.field_type = FieldType::Number;
  p.raw_text = "رقم ٤2";
  Prediction out = enhance(p);
  CHECK(out.enhanced_text == "٤٢");
  CHECK(out.flags.empty());

  p.raw_text = "لا شيء";
  out = enhance(p);
  CHECK(out.enhanced_text == "لا شيء");
  REQUIRE(out.flags.size() == 1);
  CHECK(out.flags[0].starts_with("EmptyAfterFilter"));
  CHECK(enhance(out).flags == out.flags);

  p.field_type = FieldType::Date;
  p.raw_text = "31/04/2020";
  out = enhance(p);
  CHECK(out.enhanced_text == p.raw_text);
  CHECK(out.flags[0].starts_with("DateRejected"));

  p.field_type = FieldType::SingleLine;
  p.raw_text = "  نص  ";
  CHECK(enhance(p).enhanced_text == "  نص  ");

  p.field_type = FieldType::DefinedLabel;
  p.raw_text = "لا";
  const std::vector<std::string> opts = {"نعم", "لا"};
  CHECK(enhance(p, opts).enhanced_text == "لا");
}

TEST_CASE("date oracle agrees on a sweep") {
  for (int year : {1900, 2000, 2023, 2024})
    for (int month = 0; month <= 13; ++month)
      for (int day = 0; day <= 32; ++day) {
        const std::string text = std::to_string(day) + "/" + std::to_string(month) + "/" + std::to_string(year);
        bool accepted = true;
        try {
          enhance_date(text);
        } catch (const Error&) {
          accepted = false;
        }
        CAPTURE(text);
        CHECK(accepted == oracle::valid_date(day, month, year));
      }
}
