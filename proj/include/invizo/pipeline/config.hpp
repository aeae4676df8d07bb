#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "invizo/imaging/denoise.hpp"
#include "invizo/imaging/threshold.hpp"
#include "invizo/registration/register.hpp"
#include "invizo/segmentation/segmentation.hpp"

namespace invizo::pipeline {

struct PipelineConfig {
  FnlmParams fnlm;
  ThresholdMode threshold = OtsuThreshold{};
  bool open = true;
  registration::RegistrationParams registration;
  bool fallback_on_registration_fail = true;
  segmentation::ProjectionParams projection;
  // Recognize grayscale crops instead of the binarized ones.
  bool raw_crops = false;
  std::filesystem::path checkpoint;
  int max_output = 128;
  int workers = 1;
  std::uint64_t seed = 42;

  // Service settings.
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_dir = "invizo-store";

  // The seed feeds every seeded stage (RANSAC today).
  void set_seed(std::uint64_t s);
};

// Keys mirror the struct; nested objects "fnlm", "registration" (with
// "ransac" and "scale_space"), "projection". "threshold" is "otsu" or an
// integer. Unknown keys are a SchemaError. Relative paths are resolved
// against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PipelineConfig& config);

PipelineConfig load_config(const std::filesystem::path& path);

// Reads the file named by INVIZO_CONFIG when set, defaults otherwise.
PipelineConfig config_from_env();

}  // namespace invizo::pipeline
