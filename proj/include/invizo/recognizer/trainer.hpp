#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "invizo/imaging/raster.hpp"
#include "invizo/recognizer/model.hpp"
#include "invizo/recognizer/optimizer.hpp"
#include "invizo/recognizer/vocabulary.hpp"

namespace invizo::nn {

struct TrainingSample {
  RasterImage image;
  std::string label;  // logical (reading) order
};

struct Batch {
  Tensor images;             // [B, C, H, W]
  std::vector<int> inputs;   // SOS + label, PAD-filled, B*steps
  std::vector<int> targets;  // label + EOS, PAD-filled, B*steps
  int steps = 0;
};

// Fits the line onto the model canvas (fit_line_canvas), converts channels
// and scales intensities to [0, 1]; returns [C, H, W].
Tensor prepare_image(const RasterImage& img, const ModelConfig& config);
Batch make_batch(std::span<const TrainingSample> samples, const Vocabulary& vocab, const ModelConfig& config);

AdamW make_optimizer(const Recognizer& model);

// One forward/backward/update. Returns the masked cross-entropy; throws
// TrainingDiverged when it is not finite (parameters are then untouched).
double train_step(Recognizer& model, AdamW& optimizer, const Batch& batch, Rng& rng);

// Loss and gradients without an update (gradient checks, diagnostics).
double compute_loss(const Recognizer& model, const Batch& batch, const ForwardContext& ctx);

RecognizerOutput recognize(const RasterImage& field, const Recognizer& model, const Vocabulary& vocab,
                           int max_out = 128);

struct TrainOptions {
  int steps = 300;
  int batch = 16;
  std::uint64_t seed = 42;
  // Called after every step with (step index, loss); return false to stop.
  std::function<bool(int, double)> on_step;
};

// Epoch-wise shuffled minibatches drawn with a seeded generator.
void train(Recognizer& model, AdamW& optimizer, std::span<const TrainingSample> samples,
           const Vocabulary& vocab, const TrainOptions& options);

}  // namespace invizo::nn
