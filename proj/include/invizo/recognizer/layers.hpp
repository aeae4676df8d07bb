#pragma once

#include <string>
#include <utility>
#include <vector>

#include "invizo/recognizer/ops.hpp"

namespace invizo::nn {

using NamedParams = std::vector<std::pair<std::string, Var>>;
using NamedBuffers = std::vector<std::pair<std::string, Tensor*>>;

// Per-call switches threaded through every layer.
struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // required when training with dropout > 0
  std::vector<Tensor>* attention = nullptr;  // collects softmax weights when set
};

Var apply_dropout(const Var& x, const ForwardContext& ctx);

struct Linear {
  Var w;  // [in, out]
  Var b;  // [out]
  Linear() = default;
  Linear(int in, int out, Rng& rng);
  Var operator()(const Var& x) const { return linear(x, w, b); }
  void collect(const std::string& prefix, NamedParams& out) const;
};

struct Conv3x3 {
  Var w, b;
  Conv3x3() = default;
  Conv3x3(int in, int out, Rng& rng);
  void collect(const std::string& prefix, NamedParams& out) const;
};

struct BatchNorm2d {
  Var gamma, beta;
  mutable Tensor running_mean, running_var;
  BatchNorm2d() = default;
  explicit BatchNorm2d(int channels);
  Var operator()(const Var& x, bool training) const;
  void collect(const std::string& prefix, NamedParams& out) const;
  void collect_buffers(const std::string& prefix, NamedBuffers& out) const;
};

struct LayerNorm {
  Var gamma, beta;
  LayerNorm() = default;
  explicit LayerNorm(int d);
  Var operator()(const Var& x) const { return layer_norm(x, gamma, beta); }
  void collect(const std::string& prefix, NamedParams& out) const;
};

struct MultiHeadAttention {
  Linear q, k, v, o;
  int heads = 1;
  MultiHeadAttention() = default;
  MultiHeadAttention(int d, int heads, Rng& rng);
  Var operator()(const Var& query, const Var& memory, bool causal, const ForwardContext& ctx) const;
  void collect(const std::string& prefix, NamedParams& out) const;
};

struct FeedForward {
  Linear l1, l2;
  FeedForward() = default;
  FeedForward(int d, int hidden, Rng& rng);
  Var operator()(const Var& x, const ForwardContext& ctx) const;
  void collect(const std::string& prefix, NamedParams& out) const;
};

// Post-residual layer norm throughout.
struct EncoderLayer {
  MultiHeadAttention self_attn;
  FeedForward ff;
  LayerNorm ln1, ln2;
  EncoderLayer() = default;
  EncoderLayer(int d, int heads, int ff_dim, Rng& rng);
  Var operator()(const Var& x, const ForwardContext& ctx) const;
  void collect(const std::string& prefix, NamedParams& out) const;
};

struct DecoderLayer {
  MultiHeadAttention self_attn, cross_attn;
  FeedForward ff;
  LayerNorm ln1, ln2, ln3;
  DecoderLayer() = default;
  DecoderLayer(int d, int heads, int ff_dim, Rng& rng);
  Var operator()(const Var& x, const Var& memory, const ForwardContext& ctx) const;
  void collect(const std::string& prefix, NamedParams& out) const;
};

}  // namespace invizo::nn
