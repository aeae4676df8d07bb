#include "invizo/recognizer/model.hpp"

#include <algorithm>
#include <cmath>

#include "invizo/core/error.hpp"
#include "invizo/recognizer/vocabulary.hpp"

namespace invizo::nn {

void ModelConfig::validate() const {
  require(d_model > 0 && d_model % 2 == 0, "d_model must be a positive even number");
  require(heads > 0 && d_model % heads == 0, "d_model must be divisible by heads");
  require(enc_layers >= 0 && dec_layers >= 0, "layer counts must be non-negative");
  require(ff_dim > 0, "ff_dim must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(input_w >= 8 && input_w % 8 == 0 && input_h >= 8 && input_h % 8 == 0,
          "input size must be a positive multiple of 8");
  require(input_channels == 1 || input_channels == 3, "input_channels must be 1 or 3");
  for (int c : conv_channels) require(c > 0, "conv channels must be positive");
  require(max_len >= sequence_length(), "max_len must cover the encoder sequence");
  require(batch > 0 && lr > 0.0 && weight_decay >= 0.0, "bad optimizer settings");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"d_model", d_model},     {"enc_layers", enc_layers},
          {"dec_layers", dec_layers}, {"heads", heads},
          {"ff_dim", ff_dim},       {"dropout", dropout},
          {"batch", batch},         {"lr", lr},
          {"epochs", epochs},       {"weight_decay", weight_decay},
          {"input_w", input_w},     {"input_h", input_h},
          {"input_channels", input_channels}, {"conv_channels", conv_channels},
          {"max_len", max_len},     {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.d_model = j.value("d_model", c.d_model);
    c.enc_layers = j.value("enc_layers", c.enc_layers);
    c.dec_layers = j.value("dec_layers", c.dec_layers);
    c.heads = j.value("heads", c.heads);
    c.ff_dim = j.value("ff_dim", c.ff_dim);
    c.dropout = j.value("dropout", c.dropout);
    c.batch = j.value("batch", c.batch);
    c.lr = j.value("lr", c.lr);
    c.epochs = j.value("epochs", c.epochs);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.input_w = j.value("input_w", c.input_w);
    c.input_h = j.value("input_h", c.input_h);
    c.input_channels = j.value("input_channels", c.input_channels);
    c.conv_channels = j.value("conv_channels", c.conv_channels);
    c.max_len = j.value("max_len", c.max_len);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Schema, std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

Tensor sinusoidal_pe(int max_len, int d_model) {
  require(d_model > 0 && d_model % 2 == 0, "positional encoding needs an even d_model");
  require(max_len >= 0, "max_len must be non-negative");
  Tensor pe({max_len, d_model});
  for (int pos = 0; pos < max_len; ++pos)
    for (int i = 0; i < d_model / 2; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * i / d_model);
      pe.data[static_cast<std::size_t>(pos) * d_model + 2 * i] = std::sin(angle);
      pe.data[static_cast<std::size_t>(pos) * d_model + 2 * i + 1] = std::cos(angle);
    }
  return pe;
}

Recognizer::Recognizer(const ModelConfig& config, int vocab_size) : config_(config), vocab_size_(vocab_size) {
  config_.validate();
  require(vocab_size > Vocabulary::kSpecials, "vocabulary has no characters");
  Rng rng(config_.seed);
  int in = config_.input_channels;
  for (int i = 0; i < 3; ++i) {
    convs_[i] = Conv3x3(in, config_.conv_channels[i], rng);
    norms_[i] = BatchNorm2d(config_.conv_channels[i]);
    in = config_.conv_channels[i];
  }
  const int d = config_.d_model;
  projection_ = Linear(config_.feature_width(), d, rng);
  for (int i = 0; i < config_.enc_layers; ++i) encoder_.emplace_back(d, config_.heads, config_.ff_dim, rng);
  Tensor table({vocab_size, d});
  for (double& v : table.data) v = rng.normal();
  embedding_ = parameter(std::move(table));
  for (int i = 0; i < config_.dec_layers; ++i) decoder_.emplace_back(d, config_.heads, config_.ff_dim, rng);
  output_ = Linear(d, vocab_size, rng);
  pe_ = sinusoidal_pe(config_.max_len, d);
}

Var Recognizer::cnn_features(const Var& images, const ForwardContext& ctx) const {
  const Tensor& t = images->value;
  require(t.rank() == 4 && t.dim(1) == config_.input_channels && t.dim(2) == config_.input_h &&
              t.dim(3) == config_.input_w,
          "recognizer input must be [B, " + std::to_string(config_.input_channels) + ", " +
              std::to_string(config_.input_h) + ", " + std::to_string(config_.input_w) + "]");
  Var x = images;
  for (int i = 0; i < 3; ++i) x = max_pool2x2(relu(norms_[i](conv2d_3x3(x, convs_[i].w, convs_[i].b), ctx.training)));
  return projection_(columns_to_sequence(x));
}

Var Recognizer::encode(const Var& sequence, const ForwardContext& ctx) const {
  require(sequence->value.rank() == 3 && sequence->value.dim(2) == config_.d_model, "encoder input must be [B, S, d]");
  require(sequence->value.dim(1) <= config_.max_len, "sequence longer than max_len");
  Var x = apply_dropout(add_positional(sequence, pe_), ctx);
  for (const auto& layer : encoder_) x = layer(x, ctx);
  return x;
}

Var Recognizer::decode(const Var& memory, const std::vector<int>& tokens, int steps, const ForwardContext& ctx) const {
  require(steps >= 1 && steps <= config_.max_len, "decoder steps out of range");
  const int batch = memory->value.dim(0);
  Var x = apply_dropout(add_positional(embedding(tokens, batch, steps, embedding_), pe_), ctx);
  for (const auto& layer : decoder_) x = layer(x, memory, ctx);
  return output_(x);
}

RecognizerOutput Recognizer::decode_greedy(const Var& memory, int max_out, const Vocabulary& vocab) const {
  require(max_out > 0, "max_out must be positive");
  require(memory->value.rank() == 3 && memory->value.dim(0) == 1, "greedy decoding expects a single memory");
  require(vocab.size() == vocab_size_, "vocabulary does not match the model");
  NoGradGuard no_grad;
  const ForwardContext ctx;
  RecognizerOutput out;
  std::vector<int> tokens{Vocabulary::kSos};
  const int limit = std::min(max_out, config_.max_len - 1);
  for (int step = 0; step < limit; ++step) {
    const Var logits = decode(memory, tokens, static_cast<int>(tokens.size()), ctx);
    const double* row = logits->value.data.data() + (tokens.size() - 1) * vocab_size_;
    // Specials other than EOS are never emitted.
    int best = Vocabulary::kEos;
    for (int j = Vocabulary::kSpecials; j < vocab_size_; ++j)
      if (row[j] > row[best]) best = j;
    const double mx = *std::max_element(row, row + vocab_size_);
    double sum = 0.0;
    for (int j = 0; j < vocab_size_; ++j) sum += std::exp(row[j] - mx);
    out.tokens.push_back(best);
    out.token_logprobs.push_back(row[best] - mx - std::log(sum));
    if (best == Vocabulary::kEos) break;
    tokens.push_back(best);
  }
  out.text = vocab.decode(out.tokens);
  return out;
}

NamedParams Recognizer::parameters() const {
  NamedParams out;
  for (int i = 0; i < 3; ++i) {
    convs_[i].collect("cnn.conv" + std::to_string(i), out);
    norms_[i].collect("cnn.bn" + std::to_string(i), out);
  }
  projection_.collect("cnn.proj", out);
  for (std::size_t i = 0; i < encoder_.size(); ++i) encoder_[i].collect("encoder." + std::to_string(i), out);
  out.emplace_back("decoder.embedding", embedding_);
  for (std::size_t i = 0; i < decoder_.size(); ++i) decoder_[i].collect("decoder." + std::to_string(i), out);
  output_.collect("decoder.out", out);
  return out;
}

NamedBuffers Recognizer::buffers() const {
  NamedBuffers out;
  for (int i = 0; i < 3; ++i) norms_[i].collect_buffers("cnn.bn" + std::to_string(i), out);
  return out;
}

}  // namespace invizo::nn
