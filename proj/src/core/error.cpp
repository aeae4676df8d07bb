#include "invizo/core/error.hpp"

namespace invizo {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parameter: return "ParameterError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::ImageDecode: return "ImageDecodeError";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::InsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorCode::RegistrationFailed: return "RegistrationFailed";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::DegenerateRegion: return "DegenerateRegion";
    case ErrorCode::Glyph: return "GlyphError";
    case ErrorCode::Font: return "FontError";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::EmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::DateRejected: return "DateRejected";
  }
  return "UnknownError";
}

}  // namespace invizo
