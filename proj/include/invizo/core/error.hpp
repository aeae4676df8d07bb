#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace invizo {

enum class ErrorCode {
  Parameter,
  Io,
  ImageDecode,
  Schema,
  Validation,
  InsufficientCorrespondences,
  RegistrationFailed,
  PointAtInfinity,
  DegenerateRegion,
  Glyph,
  Font,
  TrainingDiverged,
  EmptyAfterFilter,
  DateRejected,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (pipeline, CLI, HTTP service) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::Parameter, message);
}

}  // namespace invizo
