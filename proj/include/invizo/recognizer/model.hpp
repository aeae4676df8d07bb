#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "invizo/recognizer/layers.hpp"

namespace invizo::nn {

struct ModelConfig {
  int d_model = 256;
  int enc_layers = 6;
  int dec_layers = 6;
  int heads = 8;
  int ff_dim = 512;
  double dropout = 0.1;
  int batch = 16;
  double lr = 1e-4;
  int epochs = 55;
  double weight_decay = 0.01;
  int input_w = 1024;
  int input_h = 64;
  int input_channels = 3;
  std::array<int, 3> conv_channels = {32, 64, 128};
  int max_len = 2048;
  std::uint64_t seed = 42;

  int sequence_length() const noexcept { return input_w / 8; }
  int feature_width() const noexcept { return conv_channels[2] * (input_h / 8); }

  // Throws ParameterError on inconsistent values.
  void validate() const;

  nlohmann::json to_json() const;
  // Keys absent from `j` keep their defaults.
  static ModelConfig from_json(const nlohmann::json& j);
};

// PE[pos, 2i] = sin(pos / 10000^(2i/d)), PE[pos, 2i+1] = cos(same).
Tensor sinusoidal_pe(int max_len, int d_model);

struct RecognizerOutput {
  std::string text;
  std::vector<int> tokens;  // emitted ids, EOS included when reached
  std::vector<double> token_logprobs;
};

class Vocabulary;

// CNN feature extractor, transformer encoder and masked autoregressive
// decoder. Forward passes only read parameters, so one instance may serve
// concurrent inference; training mutates it and needs exclusive access.
class Recognizer {
 public:
  Recognizer(const ModelConfig& config, int vocab_size);

  const ModelConfig& config() const noexcept { return config_; }
  int vocab_size() const noexcept { return vocab_size_; }

  // images [B, C, H, W] in [0, 1] -> [B, W/8, d_model].
  Var cnn_features(const Var& images, const ForwardContext& ctx) const;
  // Adds PE and runs the encoder stack.
  Var encode(const Var& sequence, const ForwardContext& ctx) const;
  // Teacher-forced decoder: tokens holds B*steps ids; returns logits
  // [B, steps, vocab].
  Var decode(const Var& memory, const std::vector<int>& tokens, int steps, const ForwardContext& ctx) const;

  // Greedy decoding for a single memory [1, S, d].
  RecognizerOutput decode_greedy(const Var& memory, int max_out, const Vocabulary& vocab) const;

  NamedParams parameters() const;
  NamedBuffers buffers() const;

 private:
  ModelConfig config_;
  int vocab_size_;
  std::array<Conv3x3, 3> convs_;
  std::array<BatchNorm2d, 3> norms_;
  Linear projection_;
  std::vector<EncoderLayer> encoder_;
  Var embedding_;
  std::vector<DecoderLayer> decoder_;
  Linear output_;
  Tensor pe_;
};

}  // namespace invizo::nn
