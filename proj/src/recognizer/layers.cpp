#include "invizo/recognizer/layers.hpp"

#include <cmath>

#include "invizo/core/error.hpp"

namespace invizo::nn {
namespace {

Tensor uniform_tensor(std::vector<int> shape, double limit, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace

Var apply_dropout(const Var& x, const ForwardContext& ctx) {
  if (!ctx.training || ctx.dropout <= 0.0) return x;
  require(ctx.rng != nullptr, "dropout needs a random generator");
  return dropout(x, ctx.dropout, *ctx.rng);
}

Linear::Linear(int in, int out, Rng& rng)
    : w(parameter(uniform_tensor({in, out}, std::sqrt(6.0 / (in + out)), rng))),
      b(parameter(Tensor({out}, 0.0))) {}

void Linear::collect(const std::string& prefix, NamedParams& out) const {
  out.emplace_back(prefix + ".weight", w);
  out.emplace_back(prefix + ".bias", b);
}

Conv3x3::Conv3x3(int in, int out, Rng& rng)
    : w(parameter(uniform_tensor({out, in, 3, 3}, std::sqrt(6.0 / (in * 9)), rng))),
      b(parameter(Tensor({out}, 0.0))) {}

void Conv3x3::collect(const std::string& prefix, NamedParams& out) const {
  out.emplace_back(prefix + ".weight", w);
  out.emplace_back(prefix + ".bias", b);
}

BatchNorm2d::BatchNorm2d(int channels)
    : gamma(parameter(Tensor({channels}, 1.0))),
      beta(parameter(Tensor({channels}, 0.0))),
      running_mean({channels}, 0.0),
      running_var({channels}, 1.0) {}

Var BatchNorm2d::operator()(const Var& x, bool training) const {
  return batch_norm2d(x, gamma, beta, running_mean, running_var, training);
}

void BatchNorm2d::collect(const std::string& prefix, NamedParams& out) const {
  out.emplace_back(prefix + ".gamma", gamma);
  out.emplace_back(prefix + ".beta", beta);
}

void BatchNorm2d::collect_buffers(const std::string& prefix, NamedBuffers& out) const {
  out.emplace_back(prefix + ".running_mean", &running_mean);
  out.emplace_back(prefix + ".running_var", &running_var);
}

LayerNorm::LayerNorm(int d) : gamma(parameter(Tensor({d}, 1.0))), beta(parameter(Tensor({d}, 0.0))) {}

void LayerNorm::collect(const std::string& prefix, NamedParams& out) const {
  out.emplace_back(prefix + ".gamma", gamma);
  out.emplace_back(prefix + ".beta", beta);
}

MultiHeadAttention::MultiHeadAttention(int d, int h, Rng& rng)
    : q(d, d, rng), k(d, d, rng), v(d, d, rng), o(d, d, rng), heads(h) {
  require(h >= 1 && d % h == 0, "model width must be divisible by the head count");
}

Var MultiHeadAttention::operator()(const Var& query, const Var& memory, bool causal,
                                   const ForwardContext& ctx) const {
  return o(attention(q(query), k(memory), v(memory), heads, causal, ctx.attention));
}

void MultiHeadAttention::collect(const std::string& prefix, NamedParams& out) const {
  q.collect(prefix + ".q", out);
  k.collect(prefix + ".k", out);
  v.collect(prefix + ".v", out);
  o.collect(prefix + ".o", out);
}

FeedForward::FeedForward(int d, int hidden, Rng& rng) : l1(d, hidden, rng), l2(hidden, d, rng) {}

Var FeedForward::operator()(const Var& x, const ForwardContext& ctx) const {
  return l2(apply_dropout(relu(l1(x)), ctx));
}

void FeedForward::collect(const std::string& prefix, NamedParams& out) const {
  l1.collect(prefix + ".l1", out);
  l2.collect(prefix + ".l2", out);
}

EncoderLayer::EncoderLayer(int d, int heads, int ff_dim, Rng& rng)
    : self_attn(d, heads, rng), ff(d, ff_dim, rng), ln1(d), ln2(d) {}

Var EncoderLayer::operator()(const Var& x, const ForwardContext& ctx) const {
  Var h = ln1(add(x, apply_dropout(self_attn(x, x, false, ctx), ctx)));
  return ln2(add(h, apply_dropout(ff(h, ctx), ctx)));
}

void EncoderLayer::collect(const std::string& prefix, NamedParams& out) const {
  self_attn.collect(prefix + ".self_attn", out);
  ff.collect(prefix + ".ff", out);
  ln1.collect(prefix + ".ln1", out);
  ln2.collect(prefix + ".ln2", out);
}

DecoderLayer::DecoderLayer(int d, int heads, int ff_dim, Rng& rng)
    : self_attn(d, heads, rng), cross_attn(d, heads, rng), ff(d, ff_dim, rng), ln1(d), ln2(d), ln3(d) {}

Var DecoderLayer::operator()(const Var& x, const Var& memory, const ForwardContext& ctx) const {
  Var h = ln1(add(x, apply_dropout(self_attn(x, x, true, ctx), ctx)));
  h = ln2(add(h, apply_dropout(cross_attn(h, memory, false, ctx), ctx)));
  return ln3(add(h, apply_dropout(ff(h, ctx), ctx)));
}

void DecoderLayer::collect(const std::string& prefix, NamedParams& out) const {
  self_attn.collect(prefix + ".self_attn", out);
  cross_attn.collect(prefix + ".cross_attn", out);
  ff.collect(prefix + ".ff", out);
  ln1.collect(prefix + ".ln1", out);
  ln2.collect(prefix + ".ln2", out);
  ln3.collect(prefix + ".ln3", out);
}

}  // namespace invizo::nn
