#include "invizo/templates/template.hpp"

#include <array>
#include <cmath>
#include <set>

#include "invizo/core/error.hpp"
#include "invizo/imaging/image_io.hpp"
#include "invizo/templates/base64.hpp"

namespace invizo {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<FieldType, std::string_view>, 5> kTypeNames = {{
    {FieldType::SingleLine, "Single Line"},
    {FieldType::MultipleLines, "Multiple Lines"},
    {FieldType::Number, "Number"},
    {FieldType::Date, "Date"},
    {FieldType::DefinedLabel, "Defined Label"},
}};

constexpr double kBoundsTolerance = 2.0;

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::Schema, msg); }

double number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(where + " must be finite");
  return d;
}

Quad parse_points(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) schema(where + ".points must be an array of 4 [x, y] pairs");
  Quad q;
  for (std::size_t i = 0; i < 4; ++i) {
    const json& p = v[i];
    if (!p.is_array() || p.size() != 2) schema(where + ".points[" + std::to_string(i) + "] must be [x, y]");
    q[i] = {number(p[0], where + ".points"), number(p[1], where + ".points")};
  }
  return q;
}

FieldShape parse_shape(const json& v, std::size_t index) {
  const std::string where = "shapes[" + std::to_string(index) + "]";
  if (!v.is_object()) schema(where + " must be an object");
  FieldShape s;
  for (const auto& [key, value] : v.items()) {
    if (key == "id") {
      if (!value.is_string()) schema(where + ".id must be a string");
      s.id = value.get<std::string>();
    } else if (key == "type") {
      if (!value.is_string()) schema(where + ".type must be a string");
      s.type = parse_field_type(value.get<std::string>());
    } else if (key == "points") {
      s.points = parse_points(value, where);
    } else if (key == "possibilities") {
      if (!value.is_array()) schema(where + ".possibilities must be an array");
      for (const json& p : value) {
        if (!p.is_string()) schema(where + ".possibilities entries must be strings");
        s.possibilities.push_back(p.get<std::string>());
      }
    } else {
      s.extra[key] = value;
    }
  }
  if (!v.contains("type")) schema(where + " is missing 'type'");
  if (!v.contains("points")) schema(where + " is missing 'points'");
  if (s.id.empty()) s.id = "field_" + std::to_string(index);
  return s;
}

RasterImage decode_embedded(const std::string& data) {
  std::vector<std::uint8_t> bytes;
  if (!base64_decode(data, bytes) || bytes.empty()) fail(ErrorCode::ImageDecode, "imageData is not valid base64");
  return decode_image(bytes);
}

json points_json(const Quad& q) {
  json a = json::array();
  for (const Point2& p : q) a.push_back({p.x, p.y});
  return a;
}

}  // namespace

std::string_view to_string(FieldType type) noexcept {
  for (const auto& [t, name] : kTypeNames)
    if (t == type) return name;
  return "Single Line";
}

FieldType parse_field_type(std::string_view text) {
  for (const auto& [t, name] : kTypeNames)
    if (name == text) return t;
  schema("unknown field type '" + std::string(text) + "'");
}

void validate_template(const Template& t) {
  std::set<std::string> ids;
  for (const FieldShape& s : t.shapes) {
    const std::string where = "field '" + s.id + "'";
    if (!ids.insert(s.id).second) fail(ErrorCode::Validation, "duplicate field id '" + s.id + "'");
    const Polygon poly = to_polygon(s.points);
    if (!(std::abs(signed_area(poly)) > 0.0) || !is_simple(poly))
      fail(ErrorCode::Validation, where + " points do not form a simple polygon with positive area");
    if (s.type == FieldType::DefinedLabel && s.possibilities.empty())
      fail(ErrorCode::Validation, where + " is a Defined Label without possibilities");
    if (!t.image.empty()) {
      for (const Point2& p : s.points)
        if (p.x < -kBoundsTolerance || p.y < -kBoundsTolerance || p.x > t.image.width() + kBoundsTolerance ||
            p.y > t.image.height() + kBoundsTolerance)
          fail(ErrorCode::Validation, where + " lies outside the template image");
    }
  }
}

Template parse_template(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema(std::string("template is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("template must be a JSON object");
  if (!doc.contains("shapes")) schema("template is missing 'shapes'");
  if (!doc.contains("imageData") && !doc.contains("imagePath")) schema("template is missing 'imageData'");

  Template t;
  for (const auto& [key, value] : doc.items()) {
    if (key == "shapes") {
      if (!value.is_array()) schema("'shapes' must be an array");
      for (std::size_t i = 0; i < value.size(); ++i) t.shapes.push_back(parse_shape(value[i], i));
    } else if (key == "imageData") {
      if (!value.is_string()) schema("'imageData' must be a base64 string");
      t.image_data = value.get<std::string>();
    } else if (key == "imagePath") {
      if (!value.is_string()) schema("'imagePath' must be a string");
      t.image_path = value.get<std::string>();
    } else {
      t.extra[key] = value;
    }
  }
  if (t.image_data) {
    t.image = decode_embedded(*t.image_data);
    if (t.image_path) {
      t.extra["imagePath"] = *t.image_path;
      t.image_path.reset();
    }
  } else {
    const std::filesystem::path p = base_dir / *t.image_path;
    try {
      t.image = decode_image(read_file(p));
    } catch (const Error& e) {
      fail(ErrorCode::ImageDecode, "cannot load template image '" + p.string() + "': " + e.what());
    }
  }
  validate_template(t);
  return t;
}

Template load_template(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_template(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                        path.parent_path());
}

std::string serialize_template(const Template& t) {
  json doc = t.extra.is_object() ? t.extra : json::object();
  json shapes = json::array();
  for (const FieldShape& s : t.shapes) {
    json o = s.extra.is_object() ? s.extra : json::object();
    o["id"] = s.id;
    o["type"] = std::string(to_string(s.type));
    o["points"] = points_json(s.points);
    o["possibilities"] = s.possibilities;
    shapes.push_back(std::move(o));
  }
  doc["shapes"] = std::move(shapes);
  if (t.image_data) {
    doc["imageData"] = *t.image_data;
  } else if (t.image_path) {
    doc["imagePath"] = *t.image_path;
  } else {
    doc["imageData"] = base64_encode(encode_png(t.image));
  }
  return doc.dump(2) + "\n";
}

Template make_template(std::vector<FieldShape> shapes, RasterImage image) {
  Template t;
  t.shapes = std::move(shapes);
  t.image_data = base64_encode(encode_png(image));
  t.image = std::move(image);
  validate_template(t);
  return t;
}

}  // namespace invizo
