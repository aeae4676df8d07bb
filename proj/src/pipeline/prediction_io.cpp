#include "invizo/core/error.hpp"
#include "invizo/pipeline/pipeline.hpp"

using nlohmann::json;

namespace invizo::pipeline {

json predictions_to_json(const std::vector<Prediction>& predictions) {
  json arr = json::array();
  for (const auto& p : predictions) {
    json o;
    o["field_id"] = p.field_id;
    o["raw_text"] = p.raw_text;
    o["enhanced_text"] = p.enhanced_text;
    o["field_type"] = std::string(to_string(p.field_type));
    o["registration"] = std::string(to_string(p.registration));
    o["line_texts"] = p.line_texts;
    o["flags"] = p.flags;
    o["error"] = p.error ? json(*p.error) : json(nullptr);
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<Prediction> predictions_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::Schema, "predictions must be a JSON array");
  std::vector<Prediction> out;
  try {
    for (const auto& o : j) {
      Prediction p;
      p.field_id = o.at("field_id").get<std::string>();
      p.raw_text = o.at("raw_text").get<std::string>();
      p.enhanced_text = o.at("enhanced_text").get<std::string>();
      p.field_type = parse_field_type(o.at("field_type").get<std::string>());
      const std::string reg = o.at("registration").get<std::string>();
      if (reg == "matched") p.registration = RegistrationMode::Matched;
      else if (reg == "fallback") p.registration = RegistrationMode::Fallback;
      else fail(ErrorCode::Schema, "registration must be \"matched\" or \"fallback\"");
      if (o.contains("line_texts")) p.line_texts = o.at("line_texts").get<std::vector<std::string>>();
      if (o.contains("flags")) p.flags = o.at("flags").get<std::vector<std::string>>();
      if (o.contains("error") && !o.at("error").is_null()) p.error = o.at("error").get<std::string>();
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, std::string("malformed prediction: ") + e.what());
  }
  return out;
}

std::string serialize_predictions(const std::vector<Prediction>& predictions) {
  return predictions_to_json(predictions).dump(2) + "\n";
}

}  // namespace invizo::pipeline
