#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invizo/core/geometry.hpp"
#include "invizo/imaging/raster.hpp"

namespace invizo {

enum class FieldType { SingleLine, MultipleLines, Number, Date, DefinedLabel };

// "Single Line", "Multiple Lines", "Number", "Date", "Defined Label".
std::string_view to_string(FieldType type) noexcept;
// Throws SchemaError on anything else.
FieldType parse_field_type(std::string_view text);

struct FieldShape {
  std::string id;
  FieldType type = FieldType::SingleLine;
  Quad points{};
  std::vector<std::string> possibilities;
  nlohmann::json extra = nlohmann::json::object();  // unknown keys, kept verbatim

  friend bool operator==(const FieldShape&, const FieldShape&) = default;
};

struct Template {
  std::vector<FieldShape> shapes;
  RasterImage image;
  // Exactly one of these is set; the encoded form is kept so serialization
  // reproduces the input bytes of the image.
  std::optional<std::string> image_data;  // base64 PNG
  std::optional<std::string> image_path;
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const Template&, const Template&) = default;
};

// Throws SchemaError (malformed JSON, missing or mistyped keys),
// ValidationError (bad quads, duplicate ids, Defined Label without
// possibilities, quads outside the image by more than 2 px) or
// ImageDecodeError. `imagePath` is resolved against `base_dir`.
Template parse_template(std::string_view json_text, const std::filesystem::path& base_dir = {});
Template load_template(const std::filesystem::path& path);

// Canonical JSON: sorted keys, 2-space indent, trailing newline.
std::string serialize_template(const Template& t);

// Builds a validated template around an in-memory image (stored as
// embedded base64 PNG).
Template make_template(std::vector<FieldShape> shapes, RasterImage image);

// Checks every FieldShape invariant against the image bounds.
void validate_template(const Template& t);

}  // namespace invizo
