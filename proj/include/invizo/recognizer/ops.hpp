#pragma once

#include <vector>

#include "invizo/recognizer/autograd.hpp"

namespace invizo::nn {

Var add(const Var& a, const Var& b);  // same shape
Var scale(const Var& a, double s);
Var relu(const Var& a);

// x[..., k] * w[k, n] (+ b[n]); b may be null.
Var linear(const Var& x, const Var& w, const Var& b);

// x[..., d] + c[S, d] where the second-to-last dimension of x is S' <= S and
// only the first S' rows of c are used. c carries no gradient.
Var add_positional(const Var& x, const Tensor& c);

// 3x3 convolution, stride 1, zero padding 1. x[B, C, H, W], w[O, C, 3, 3], b[O].
Var conv2d_3x3(const Var& x, const Var& w, const Var& b);

// Per-channel normalization of x[B, C, H, W]. In training the batch
// statistics are used (biased variance) and the running estimates updated
// with `momentum`; otherwise the running estimates are used.
Var batch_norm2d(const Var& x, const Var& gamma, const Var& beta, Tensor& running_mean,
                 Tensor& running_var, bool training, double momentum = 0.1, double eps = 1e-5);

// 2x2 max pooling with stride 2 (odd trailing rows/columns dropped). Ties go
// to the first element in row-major window order.
Var max_pool2x2(const Var& x);

// x[B, C, H, W] -> [B, W, C*H]; feature index c*H + h.
Var columns_to_sequence(const Var& x);

// Normalizes the last dimension; gamma, beta of that size.
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);

// Multi-head scaled dot-product attention on already projected inputs:
// q[B, Sq, d], k[B, Sk, d], v[B, Sk, d], d split evenly over heads. With
// `causal`, query i sees keys j <= i. When `probs` is non-null the softmax
// weights are appended as one [B, heads, Sq, Sk] tensor.
Var attention(const Var& q, const Var& k, const Var& v, int heads, bool causal,
              std::vector<Tensor>* probs = nullptr);

// Inverted dropout; identity when p == 0.
Var dropout(const Var& x, double p, Rng& rng);

// tokens (B*T ids) -> [B, T, d] rows of table[V, d].
Var embedding(const std::vector<int>& tokens, int batch, int steps, const Var& table);

// Mean token cross-entropy of logits[B, T, V] against targets (B*T ids),
// skipping positions equal to `ignore`. Zero when every target is ignored.
Var cross_entropy(const Var& logits, const std::vector<int>& targets, int ignore);

}  // namespace invizo::nn
