#include "invizo/recognizer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invizo/core/error.hpp"
#include "invizo/imaging/color.hpp"
#include "invizo/imaging/resample.hpp"

namespace invizo::nn {

Tensor prepare_image(const RasterImage& img, const ModelConfig& config) {
  require(!img.empty(), "cannot recognize an empty image");
  RasterImage src = config.input_channels == 1 ? to_grayscale(img) : (img.channels() == 3 ? img : gray_to_rgb(img));
  src = fit_line_canvas(src, config.input_w, config.input_h);
  const int c = config.input_channels, h = config.input_h, w = config.input_w;
  Tensor t({c, h, w});
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        t.data[(static_cast<std::size_t>(ch) * h + y) * w + x] = src.at(x, y, ch) / 255.0;
  return t;
}

Batch make_batch(std::span<const TrainingSample> samples, const Vocabulary& vocab, const ModelConfig& config) {
  require(!samples.empty(), "batch must not be empty");
  std::vector<std::vector<int>> labels;
  int longest = 0;
  for (const auto& s : samples) {
    labels.push_back(vocab.encode(s.label));
    longest = std::max(longest, static_cast<int>(labels.back().size()));
  }
  Batch b;
  b.steps = longest + 1;
  require(b.steps <= config.max_len, "label longer than max_len");
  const int n = static_cast<int>(samples.size());
  b.images = Tensor({n, config.input_channels, config.input_h, config.input_w});
  const std::size_t per = static_cast<std::size_t>(config.input_channels) * config.input_h * config.input_w;
  b.inputs.assign(static_cast<std::size_t>(n) * b.steps, Vocabulary::kPad);
  b.targets.assign(static_cast<std::size_t>(n) * b.steps, Vocabulary::kPad);
  for (int i = 0; i < n; ++i) {
    const Tensor img = prepare_image(samples[i].image, config);
    std::copy(img.data.begin(), img.data.end(), b.images.data.begin() + i * per);
    const auto& ids = labels[i];
    int* in = b.inputs.data() + static_cast<std::size_t>(i) * b.steps;
    int* tg = b.targets.data() + static_cast<std::size_t>(i) * b.steps;
    in[0] = Vocabulary::kSos;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      in[t + 1] = ids[t];
      tg[t] = ids[t];
    }
    tg[ids.size()] = Vocabulary::kEos;
  }
  return b;
}

AdamW make_optimizer(const Recognizer& model) {
  std::vector<Var> params;
  for (const auto& [name, p] : model.parameters()) params.push_back(p);
  const auto& c = model.config();
  return AdamW(std::move(params), {c.lr, 0.9, 0.999, 1e-8, c.weight_decay});
}

double compute_loss(const Recognizer& model, const Batch& batch, const ForwardContext& ctx) {
  const Var images = constant(batch.images);
  const Var memory = model.encode(model.cnn_features(images, ctx), ctx);
  const Var logits = model.decode(memory, batch.inputs, batch.steps, ctx);
  const Var loss = cross_entropy(logits, batch.targets, Vocabulary::kPad);
  backward(loss);
  return loss->value[0];
}

double train_step(Recognizer& model, AdamW& optimizer, const Batch& batch, Rng& rng) {
  optimizer.zero_grad();
  ForwardContext ctx;
  ctx.training = true;
  ctx.dropout = model.config().dropout;
  ctx.rng = &rng;
  const double loss = compute_loss(model, batch, ctx);
  if (!std::isfinite(loss)) fail(ErrorCode::TrainingDiverged, "training loss is not finite");
  optimizer.step();
  return loss;
}

RecognizerOutput recognize(const RasterImage& field, const Recognizer& model, const Vocabulary& vocab, int max_out) {
  NoGradGuard no_grad;
  const auto& c = model.config();
  Tensor img = prepare_image(field, c);
  img.shape.insert(img.shape.begin(), 1);
  const ForwardContext ctx;
  const Var memory = model.encode(model.cnn_features(constant(std::move(img)), ctx), ctx);
  return model.decode_greedy(memory, max_out, vocab);
}

void train(Recognizer& model, AdamW& optimizer, std::span<const TrainingSample> samples, const Vocabulary& vocab,
           const TrainOptions& options) {
  require(!samples.empty(), "no training samples");
  require(options.batch > 0 && options.steps >= 0, "bad training options");
  Rng rng(options.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::vector<TrainingSample> chunk;
  for (int step = 0; step < options.steps; ++step) {
    chunk.clear();
    while (static_cast<int>(chunk.size()) < options.batch && chunk.size() < samples.size()) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        cursor = 0;
      }
      chunk.push_back(samples[order[cursor++]]);
    }
    const Batch batch = make_batch(chunk, vocab, model.config());
    const double loss = train_step(model, optimizer, batch, rng);
    if (options.on_step && !options.on_step(step, loss)) break;
  }
}

}  // namespace invizo::nn
