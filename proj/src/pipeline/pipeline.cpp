#include "invizo/pipeline/pipeline.hpp"

#include <atomic>
#include <thread>

#include "invizo/core/error.hpp"
#include "invizo/imaging/color.hpp"
#include "invizo/imaging/morphology.hpp"
#include "invizo/recognizer/checkpoint.hpp"
#include "invizo/recognizer/trainer.hpp"
#include "invizo/registration/register.hpp"
#include "invizo/registration/warp.hpp"

namespace invizo::pipeline {

Preprocessed preprocess(const RasterImage& image, const PipelineConfig& config) {
  Preprocessed p;
  p.gray = to_grayscale(image);
  const RasterImage denoised = fnlm_denoise(p.gray, config.fnlm);
  p.binary = binarize(denoised, config.threshold).image;
  // Morphology treats 255 as foreground; ink is 0 here.
  if (config.open) p.binary = invert(open(invert(p.binary)));
  return p;
}

ModelSnapshot load_model(const PipelineConfig& config) {
  require(!config.checkpoint.empty(), "no model checkpoint configured");
  ModelSnapshot s;
  s.model = nn::load_checkpoint(config.checkpoint);
  s.vocab = nn::Vocabulary::load(nn::vocabulary_path(config.checkpoint));
  return s;
}

namespace {

std::string recognize_text(const RasterImage& crop, const PipelineConfig& config, const ModelSnapshot& model) {
  return nn::recognize(crop, *model.model, model.vocab, config.max_output).text;
}

void run_field(const FieldShape& shape, const Quad& quad, const Preprocessed& pre, const PipelineConfig& config,
               const ModelSnapshot& model, Prediction& pred) {
  const RasterImage& source = config.raw_crops ? pre.gray : pre.binary;
  try {
    const RasterImage crop = registration::warp_extract(source, quad);
    if (shape.type == FieldType::MultipleLines) {
      const RasterImage binary_crop = config.raw_crops ? registration::warp_extract(pre.binary, quad) : crop;
      const auto lines = segmentation::segment_lines_projection(binary_crop, config.projection);
      for (const auto& line : lines) pred.line_texts.push_back(recognize_text(registration::warp_extract(crop, line.quad), config, model));
      for (std::size_t i = 0; i < pred.line_texts.size(); ++i) {
        if (i) pred.raw_text += '\n';
        pred.raw_text += pred.line_texts[i];
      }
    } else {
      pred.raw_text = recognize_text(crop, config, model);
    }
  } catch (const Error& e) {
    pred.flags.push_back(std::string(to_string(e.code())));
    pred.error = e.what();
    pred.enhanced_text = pred.raw_text;
    return;
  }
  pred = enhance(std::move(pred), shape.possibilities);
}

}  // namespace

PipelineResult run_pipeline(const RasterImage& test_image, const Template& tmpl, const PipelineConfig& config,
                            const ModelSnapshot& model) {
  require(model.model != nullptr, "pipeline needs a recognizer");
  PipelineResult result;
  Preprocessed pre;
  try {
    require(!test_image.empty(), "test image is empty");
    pre = preprocess(test_image, config);
  } catch (const Error& e) {
    throw StageError(kStagePreprocess, e);
  }

  try {
    const auto reg = registration::register_images(to_grayscale(tmpl.image), pre.gray, config.registration);
    result.homography = reg.h;
  } catch (const Error& e) {
    const bool recoverable =
        e.code() == ErrorCode::RegistrationFailed || e.code() == ErrorCode::InsufficientCorrespondences;
    if (!config.fallback_on_registration_fail || !recoverable)
      throw StageError(kStageRegistration, e);
    result.registration = RegistrationMode::Fallback;
    result.registration_error = e.what();
  }

  const std::size_t n = tmpl.shapes.size();
  result.predictions.resize(n);
  result.projected.resize(n);
  std::vector<bool> projected_ok(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    const FieldShape& shape = tmpl.shapes[i];
    Prediction& p = result.predictions[i];
    p.field_id = shape.id;
    p.field_type = shape.type;
    p.registration = result.registration;
    if (result.registration == RegistrationMode::Fallback) p.flags.push_back(std::string(to_string(ErrorCode::RegistrationFailed)));
    result.projected[i] = shape.points;
    if (result.homography) {
      try {
        result.projected[i] = registration::project_quad(*result.homography, shape.points);
      } catch (const Error& e) {
        p.flags.push_back(std::string(to_string(e.code())));
        p.error = e.what();
        projected_ok[i] = false;
      }
    }
  }

  // Fields are independent; results land by index so order never depends
  // on scheduling.
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++)
      if (projected_ok[i])
        run_field(tmpl.shapes[i], result.projected[i], pre, config, model, result.predictions[i]);
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return result;
}

}  // namespace invizo::pipeline
