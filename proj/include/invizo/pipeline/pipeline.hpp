#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invizo/core/error.hpp"
#include "invizo/enhancement/enhance.hpp"
#include "invizo/imaging/raster.hpp"
#include "invizo/pipeline/config.hpp"
#include "invizo/recognizer/model.hpp"
#include "invizo/recognizer/vocabulary.hpp"
#include "invizo/registration/homography.hpp"
#include "invizo/templates/template.hpp"

namespace invizo::pipeline {

struct Preprocessed {
  RasterImage gray;    // grayscale original
  RasterImage binary;  // ink 0 on 255
};

// grayscale -> fnlm -> binarize -> opening of the ink. The input is untouched.
Preprocessed preprocess(const RasterImage& image, const PipelineConfig& config);

// Trained model plus vocabulary; shared read-only between requests.
struct ModelSnapshot {
  std::shared_ptr<const nn::Recognizer> model;
  nn::Vocabulary vocab;
};

// Loads config.checkpoint and its sibling vocabulary file.
ModelSnapshot load_model(const PipelineConfig& config);

struct PipelineResult {
  std::vector<Prediction> predictions;  // template shape order
  RegistrationMode registration = RegistrationMode::Matched;
  std::optional<registration::Homography> homography;
  std::vector<Quad> projected;  // field quads in test-image coordinates
  std::optional<std::string> registration_error;
};

// Pipeline stage names used in failure reports.
inline constexpr const char* kStagePreprocess = "preprocess";
inline constexpr const char* kStageRegistration = "registration";

// Thrown when a whole request fails; carries the stage and the original code.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Per-field failures end up in the prediction; only preprocessing, or
// registration with fallback disabled, throws (StageError).
PipelineResult run_pipeline(const RasterImage& test_image, const Template& tmpl, const PipelineConfig& config,
                            const ModelSnapshot& model);

// JSON array of predictions, one object per field, keys as in Prediction.
nlohmann::json predictions_to_json(const std::vector<Prediction>& predictions);
std::vector<Prediction> predictions_from_json(const nlohmann::json& j);
// predictions_to_json dumped with 2-space indent and a trailing newline.
std::string serialize_predictions(const std::vector<Prediction>& predictions);

}  // namespace invizo::pipeline
