#include "invizo/recognizer/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invizo/core/error.hpp"
#include "invizo/simd/gemm.hpp"
#include "invizo/simd/kernels.hpp"

namespace invizo::nn {
namespace {

using simd::gemm;
using simd::Transpose;

void accumulate(Tensor& dst, const Tensor& src) {
  simd::active().axpy_f64(1.0, src.data.data(), dst.data.data(), dst.size());
}

// Fills cols[C*9, H*W] for one image.
void im2col(const double* x, int c_in, int h, int w, double* cols) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < c_in; ++c)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        double* row = cols + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * hw;
        const double* plane = x + static_cast<std::size_t>(c) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          double* out = row + static_cast<std::size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill(out, out + w, 0.0);
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(sy) * w;
          for (int xx = 0; xx < w; ++xx) {
            const int sx = xx + kx - 1;
            out[xx] = (sx < 0 || sx >= w) ? 0.0 : src[sx];
          }
        }
      }
}

void col2im_add(const double* cols, int c_in, int h, int w, double* dx) {
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < c_in; ++c)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        const double* row = cols + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * hw;
        double* plane = dx + static_cast<std::size_t>(c) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const double* in = row + static_cast<std::size_t>(y) * w;
          double* dst = plane + static_cast<std::size_t>(sy) * w;
          for (int xx = 0; xx < w; ++xx) {
            const int sx = xx + kx - 1;
            if (sx >= 0 && sx < w) dst[sx] += in[xx];
          }
        }
      }
}

}  // namespace

Var add(const Var& a, const Var& b) {
  require(a->value.same_shape(b->value), "add needs equal shapes");
  Tensor out = a->value;
  simd::active().axpy_f64(1.0, b->value.data.data(), out.data.data(), out.size());
  return make_node(std::move(out), {a, b}, [](Node& self) {
    for (auto& p : self.parents)
      if (p->requires_grad) accumulate(p->grad_buffer(), self.grad);
  });
}

Var scale(const Var& a, double s) {
  Tensor out = a->value;
  for (double& v : out.data) v *= s;
  return make_node(std::move(out), {a}, [s](Node& self) {
    simd::active().axpy_f64(s, self.grad.data.data(), self.parents[0]->grad_buffer().data.data(), self.grad.size());
  });
}

Var relu(const Var& a) {
  Tensor out = a->value;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return make_node(std::move(out), {a}, [](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (self.value.data[i] > 0.0) g.data[i] += self.grad.data[i];
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  require(w->value.rank() == 2 && x->value.dim(-1) == w->value.dim(0), "linear: input width does not match weight");
  const std::size_t k = w->value.dim(0);
  const std::size_t n = w->value.dim(1);
  const std::size_t rows = x->value.rows();
  std::vector<int> shape = x->value.shape;
  shape.back() = static_cast<int>(n);
  Tensor out(shape);
  gemm(Transpose::No, Transpose::No, rows, n, k, x->value.data.data(), w->value.data.data(), out.data.data(), false);
  if (b) {
    require(b->value.size() == n, "linear: bias size does not match weight");
    for (std::size_t r = 0; r < rows; ++r)
      simd::active().axpy_f64(1.0, b->value.data.data(), out.data.data() + r * n, n);
  }
  std::vector<Var> parents{x, w};
  if (b) parents.push_back(b);
  return make_node(std::move(out), std::move(parents), [rows, k, n](Node& self) {
    const double* dy = self.grad.data.data();
    const Node& x = *self.parents[0];
    const Node& w = *self.parents[1];
    if (x.requires_grad)
      gemm(Transpose::No, Transpose::Yes, rows, k, n, dy, w.value.data.data(),
           self.parents[0]->grad_buffer().data.data(), true);
    if (w.requires_grad)
      gemm(Transpose::Yes, Transpose::No, k, n, rows, x.value.data.data(), dy,
           self.parents[1]->grad_buffer().data.data(), true);
    if (self.parents.size() > 2 && self.parents[2]->requires_grad) {
      double* db = self.parents[2]->grad_buffer().data.data();
      for (std::size_t r = 0; r < rows; ++r) simd::active().axpy_f64(1.0, dy + r * n, db, n);
    }
  });
}

Var add_positional(const Var& x, const Tensor& c) {
  const Tensor& xv = x->value;
  require(xv.rank() >= 2 && c.rank() == 2, "add_positional: bad ranks");
  const int s = xv.dim(-2), d = xv.dim(-1);
  require(d == c.dim(1) && s <= c.dim(0), "add_positional: table too small for the input");
  Tensor out = xv;
  const std::size_t block = static_cast<std::size_t>(s) * d;
  for (std::size_t off = 0; off < out.size(); off += block)
    simd::active().axpy_f64(1.0, c.data.data(), out.data.data() + off, block);
  return make_node(std::move(out), {x}, [](Node& self) { accumulate(self.parents[0]->grad_buffer(), self.grad); });
}

Var conv2d_3x3(const Var& x, const Var& w, const Var& b) {
  const Tensor& xv = x->value;
  require(xv.rank() == 4, "conv2d expects [B, C, H, W]");
  const int bsz = xv.dim(0), c_in = xv.dim(1), h = xv.dim(2), wd = xv.dim(3);
  require(w->value.rank() == 4 && w->value.dim(1) == c_in && w->value.dim(2) == 3 && w->value.dim(3) == 3,
          "conv2d weight must be [O, C, 3, 3]");
  const int c_out = w->value.dim(0);
  require(b->value.size() == static_cast<std::size_t>(c_out), "conv2d bias size mismatch");
  const std::size_t hw = static_cast<std::size_t>(h) * wd;
  const std::size_t kk = static_cast<std::size_t>(c_in) * 9;
  Tensor out({bsz, c_out, h, wd});
  std::vector<double> cols(kk * hw);
  for (int n = 0; n < bsz; ++n) {
    im2col(xv.data.data() + static_cast<std::size_t>(n) * c_in * hw, c_in, h, wd, cols.data());
    double* o = out.data.data() + static_cast<std::size_t>(n) * c_out * hw;
    gemm(Transpose::No, Transpose::No, c_out, hw, kk, w->value.data.data(), cols.data(), o, false);
    for (int oc = 0; oc < c_out; ++oc) {
      const double bias = b->value.data[oc];
      double* plane = o + static_cast<std::size_t>(oc) * hw;
      for (std::size_t i = 0; i < hw; ++i) plane[i] += bias;
    }
  }
  return make_node(std::move(out), {x, w, b}, [bsz, c_in, c_out, h, wd, hw, kk](Node& self) {
    Node& xn = *self.parents[0];
    Node& wn = *self.parents[1];
    Node& bn = *self.parents[2];
    std::vector<double> cols(kk * hw);
    std::vector<double> dcols(xn.requires_grad ? kk * hw : 0);
    for (int n = 0; n < bsz; ++n) {
      const double* dy = self.grad.data.data() + static_cast<std::size_t>(n) * c_out * hw;
      if (wn.requires_grad) {
        im2col(xn.value.data.data() + static_cast<std::size_t>(n) * c_in * hw, c_in, h, wd, cols.data());
        gemm(Transpose::No, Transpose::Yes, c_out, kk, hw, dy, cols.data(), wn.grad_buffer().data.data(), true);
      }
      if (bn.requires_grad) {
        double* db = bn.grad_buffer().data.data();
        for (int oc = 0; oc < c_out; ++oc) {
          double s = 0.0;
          const double* plane = dy + static_cast<std::size_t>(oc) * hw;
          for (std::size_t i = 0; i < hw; ++i) s += plane[i];
          db[oc] += s;
        }
      }
      if (xn.requires_grad) {
        gemm(Transpose::Yes, Transpose::No, kk, hw, c_out, wn.value.data.data(), dy, dcols.data(), false);
        col2im_add(dcols.data(), c_in, h, wd, xn.grad_buffer().data.data() + static_cast<std::size_t>(n) * c_in * hw);
      }
    }
  });
}

Var batch_norm2d(const Var& x, const Var& gamma, const Var& beta, Tensor& running_mean, Tensor& running_var,
                 bool training, double momentum, double eps) {
  const Tensor& xv = x->value;
  require(xv.rank() == 4, "batch_norm2d expects [B, C, H, W]");
  const int bsz = xv.dim(0), ch = xv.dim(1);
  const std::size_t hw = static_cast<std::size_t>(xv.dim(2)) * xv.dim(3);
  const double count = static_cast<double>(bsz) * static_cast<double>(hw);
  std::vector<double> mean(ch), inv_std(ch);
  for (int c = 0; c < ch; ++c) {
    if (training) {
      double s = 0.0;
      for (int n = 0; n < bsz; ++n) {
        const double* p = xv.data.data() + (static_cast<std::size_t>(n) * ch + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) s += p[i];
      }
      const double m = s / count;
      double ss = 0.0;
      for (int n = 0; n < bsz; ++n) {
        const double* p = xv.data.data() + (static_cast<std::size_t>(n) * ch + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) ss += (p[i] - m) * (p[i] - m);
      }
      const double var = ss / count;
      mean[c] = m;
      inv_std[c] = 1.0 / std::sqrt(var + eps);
      const double unbiased = count > 1 ? ss / (count - 1) : var;
      running_mean.data[c] = (1.0 - momentum) * running_mean.data[c] + momentum * m;
      running_var.data[c] = (1.0 - momentum) * running_var.data[c] + momentum * unbiased;
    } else {
      mean[c] = running_mean.data[c];
      inv_std[c] = 1.0 / std::sqrt(running_var.data[c] + eps);
    }
  }
  Tensor out(xv.shape);
  for (int n = 0; n < bsz; ++n)
    for (int c = 0; c < ch; ++c) {
      const std::size_t off = (static_cast<std::size_t>(n) * ch + c) * hw;
      const double g = gamma->value.data[c], bt = beta->value.data[c];
      for (std::size_t i = 0; i < hw; ++i) out.data[off + i] = g * (xv.data[off + i] - mean[c]) * inv_std[c] + bt;
    }
  return make_node(std::move(out), {x, gamma, beta}, [bsz, ch, hw, count, training, mean, inv_std](Node& self) {
    Node& xn = *self.parents[0];
    Node& gn = *self.parents[1];
    Node& bn = *self.parents[2];
    for (int c = 0; c < ch; ++c) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int n = 0; n < bsz; ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * ch + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          const double xhat = (xn.value.data[off + i] - mean[c]) * inv_std[c];
          sum_dy += self.grad.data[off + i];
          sum_dy_xhat += self.grad.data[off + i] * xhat;
        }
      }
      if (gn.requires_grad) gn.grad_buffer().data[c] += sum_dy_xhat;
      if (bn.requires_grad) bn.grad_buffer().data[c] += sum_dy;
      if (!xn.requires_grad) continue;
      const double g = gn.value.data[c];
      Tensor& dx = xn.grad_buffer();
      for (int n = 0; n < bsz; ++n) {
        const std::size_t off = (static_cast<std::size_t>(n) * ch + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          const double dy = self.grad.data[off + i];
          if (training) {
            const double xhat = (xn.value.data[off + i] - mean[c]) * inv_std[c];
            dx.data[off + i] += g * inv_std[c] * (dy - sum_dy / count - xhat * sum_dy_xhat / count);
          } else {
            dx.data[off + i] += g * inv_std[c] * dy;
          }
        }
      }
    }
  });
}

Var max_pool2x2(const Var& x) {
  const Tensor& xv = x->value;
  require(xv.rank() == 4, "max_pool2x2 expects [B, C, H, W]");
  const int bsz = xv.dim(0), ch = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  const int ho = h / 2, wo = w / 2;
  require(ho >= 1 && wo >= 1, "max_pool2x2 input too small");
  Tensor out({bsz, ch, ho, wo});
  std::vector<std::size_t> argmax(out.size());
  std::size_t o = 0;
  for (int p = 0; p < bsz * ch; ++p) {
    const std::size_t base = static_cast<std::size_t>(p) * h * w;
    for (int y = 0; y < ho; ++y)
      for (int xx = 0; xx < wo; ++xx, ++o) {
        std::size_t best = base + static_cast<std::size_t>(2 * y) * w + 2 * xx;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t idx = base + static_cast<std::size_t>(2 * y + dy) * w + 2 * xx + dx;
            if (xv.data[idx] > xv.data[best]) best = idx;
          }
        argmax[o] = best;
        out.data[o] = xv.data[best];
      }
  }
  return make_node(std::move(out), {x}, [argmax = std::move(argmax)](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < argmax.size(); ++i) g.data[argmax[i]] += self.grad.data[i];
  });
}

Var columns_to_sequence(const Var& x) {
  const Tensor& xv = x->value;
  require(xv.rank() == 4, "columns_to_sequence expects [B, C, H, W]");
  const int bsz = xv.dim(0), ch = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  const int f = ch * h;
  Tensor out({bsz, w, f});
  const auto src_index = [=](int n, int c, int y, int xx) {
    return ((static_cast<std::size_t>(n) * ch + c) * h + y) * w + xx;
  };
  for (int n = 0; n < bsz; ++n)
    for (int c = 0; c < ch; ++c)
      for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < w; ++xx)
          out.data[(static_cast<std::size_t>(n) * w + xx) * f + c * h + y] = xv.data[src_index(n, c, y, xx)];
  return make_node(std::move(out), {x}, [=](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (int n = 0; n < bsz; ++n)
      for (int c = 0; c < ch; ++c)
        for (int y = 0; y < h; ++y)
          for (int xx = 0; xx < w; ++xx)
            g.data[src_index(n, c, y, xx)] += self.grad.data[(static_cast<std::size_t>(n) * w + xx) * f + c * h + y];
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const Tensor& xv = x->value;
  const std::size_t d = xv.dim(-1);
  require(gamma->value.size() == d && beta->value.size() == d, "layer_norm parameter size mismatch");
  const std::size_t rows = xv.rows();
  Tensor out(xv.shape);
  std::vector<double> xhat(xv.size()), inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* p = xv.data.data() + r * d;
    double m = 0.0;
    for (std::size_t i = 0; i < d; ++i) m += p[i];
    m /= static_cast<double>(d);
    double v = 0.0;
    for (std::size_t i = 0; i < d; ++i) v += (p[i] - m) * (p[i] - m);
    v /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(v + eps);
    for (std::size_t i = 0; i < d; ++i) {
      xhat[r * d + i] = (p[i] - m) * inv_std[r];
      out.data[r * d + i] = gamma->value.data[i] * xhat[r * d + i] + beta->value.data[i];
    }
  }
  return make_node(std::move(out), {x, gamma, beta},
                   [rows, d, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                     Node& xn = *self.parents[0];
                     Node& gn = *self.parents[1];
                     Node& bn = *self.parents[2];
                     const double* dy = self.grad.data.data();
                     if (gn.requires_grad || bn.requires_grad) {
                       Tensor& dg = gn.grad_buffer();
                       Tensor& db = bn.grad_buffer();
                       for (std::size_t r = 0; r < rows; ++r)
                         for (std::size_t i = 0; i < d; ++i) {
                           dg.data[i] += dy[r * d + i] * xhat[r * d + i];
                           db.data[i] += dy[r * d + i];
                         }
                     }
                     if (!xn.requires_grad) return;
                     Tensor& dx = xn.grad_buffer();
                     const double dd = static_cast<double>(d);
                     for (std::size_t r = 0; r < rows; ++r) {
                       double s1 = 0.0, s2 = 0.0;
                       for (std::size_t i = 0; i < d; ++i) {
                         const double g = dy[r * d + i] * gn.value.data[i];
                         s1 += g;
                         s2 += g * xhat[r * d + i];
                       }
                       for (std::size_t i = 0; i < d; ++i) {
                         const double g = dy[r * d + i] * gn.value.data[i];
                         dx.data[r * d + i] += inv_std[r] * (g - s1 / dd - xhat[r * d + i] * s2 / dd);
                       }
                     }
                   });
}

Var attention(const Var& q, const Var& k, const Var& v, int heads, bool causal, std::vector<Tensor>* probs) {
  const Tensor& qv = q->value;
  const Tensor& kv = k->value;
  const Tensor& vv = v->value;
  require(qv.rank() == 3 && kv.rank() == 3 && vv.rank() == 3, "attention expects [B, S, d] inputs");
  require(kv.same_shape(vv) && qv.dim(0) == kv.dim(0) && qv.dim(2) == kv.dim(2), "attention input shapes differ");
  const int bsz = qv.dim(0), sq = qv.dim(1), sk = kv.dim(1), d = qv.dim(2);
  require(heads >= 1 && d % heads == 0, "model width must be divisible by the head count");
  const int dh = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  // Weights kept as [B, heads, Sq, Sk] for the backward pass.
  Tensor p({bsz, heads, sq, sk});
  Tensor out({bsz, sq, d});
  std::vector<double> qh(static_cast<std::size_t>(sq) * dh), kh(static_cast<std::size_t>(sk) * dh),
      vh(static_cast<std::size_t>(sk) * dh), oh(static_cast<std::size_t>(sq) * dh);
  const auto gather = [d, dh](const Tensor& t, int n, int h, int s, double* dst) {
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < dh; ++j)
        dst[static_cast<std::size_t>(i) * dh + j] = t.data[(static_cast<std::size_t>(n) * s + i) * d + h * dh + j];
  };
  for (int n = 0; n < bsz; ++n)
    for (int h = 0; h < heads; ++h) {
      gather(qv, n, h, sq, qh.data());
      gather(kv, n, h, sk, kh.data());
      gather(vv, n, h, sk, vh.data());
      double* ph = p.data.data() + (static_cast<std::size_t>(n) * heads + h) * sq * sk;
      simd::gemm(simd::Transpose::No, simd::Transpose::Yes, sq, sk, dh, qh.data(), kh.data(), ph, false);
      for (int i = 0; i < sq; ++i) {
        double* row = ph + static_cast<std::size_t>(i) * sk;
        const int visible = causal ? std::min(sk, i + 1) : sk;
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < visible; ++j) {
          row[j] *= inv_sqrt;
          mx = std::max(mx, row[j]);
        }
        double sum = 0.0;
        for (int j = 0; j < visible; ++j) {
          row[j] = std::exp(row[j] - mx);
          sum += row[j];
        }
        for (int j = 0; j < visible; ++j) row[j] /= sum;
        for (int j = visible; j < sk; ++j) row[j] = 0.0;
      }
      simd::gemm(simd::Transpose::No, simd::Transpose::No, sq, dh, sk, ph, vh.data(), oh.data(), false);
      for (int i = 0; i < sq; ++i)
        for (int j = 0; j < dh; ++j)
          out.data[(static_cast<std::size_t>(n) * sq + i) * d + h * dh + j] = oh[static_cast<std::size_t>(i) * dh + j];
    }
  if (probs) probs->push_back(p);

  return make_node(std::move(out), {q, k, v}, [=, p = std::move(p)](Node& self) {
    Node& qn = *self.parents[0];
    Node& kn = *self.parents[1];
    Node& vn = *self.parents[2];
    std::vector<double> qh(static_cast<std::size_t>(sq) * dh), kh(static_cast<std::size_t>(sk) * dh),
        vh(static_cast<std::size_t>(sk) * dh), doh(static_cast<std::size_t>(sq) * dh),
        dp(static_cast<std::size_t>(sq) * sk), dqh(static_cast<std::size_t>(sq) * dh),
        dkh(static_cast<std::size_t>(sk) * dh), dvh(static_cast<std::size_t>(sk) * dh);
    const auto scatter = [d, dh](Tensor& t, int n, int h, int s, const double* src) {
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < dh; ++j)
          t.data[(static_cast<std::size_t>(n) * s + i) * d + h * dh + j] += src[static_cast<std::size_t>(i) * dh + j];
    };
    for (int n = 0; n < bsz; ++n)
      for (int h = 0; h < heads; ++h) {
        gather(qn.value, n, h, sq, qh.data());
        gather(kn.value, n, h, sk, kh.data());
        gather(vn.value, n, h, sk, vh.data());
        gather(self.grad, n, h, sq, doh.data());
        const double* ph = p.data.data() + (static_cast<std::size_t>(n) * heads + h) * sq * sk;
        if (vn.requires_grad) {
          simd::gemm(simd::Transpose::Yes, simd::Transpose::No, sk, dh, sq, ph, doh.data(), dvh.data(), false);
          scatter(vn.grad_buffer(), n, h, sk, dvh.data());
        }
        if (!qn.requires_grad && !kn.requires_grad) continue;
        simd::gemm(simd::Transpose::No, simd::Transpose::Yes, sq, sk, dh, doh.data(), vh.data(), dp.data(), false);
        for (int i = 0; i < sq; ++i) {
          const double* prow = ph + static_cast<std::size_t>(i) * sk;
          double* drow = dp.data() + static_cast<std::size_t>(i) * sk;
          double dot = 0.0;
          for (int j = 0; j < sk; ++j) dot += prow[j] * drow[j];
          for (int j = 0; j < sk; ++j) drow[j] = prow[j] * (drow[j] - dot) * inv_sqrt;
        }
        if (qn.requires_grad) {
          simd::gemm(simd::Transpose::No, simd::Transpose::No, sq, dh, sk, dp.data(), kh.data(), dqh.data(), false);
          scatter(qn.grad_buffer(), n, h, sq, dqh.data());
        }
        if (kn.requires_grad) {
          simd::gemm(simd::Transpose::Yes, simd::Transpose::No, sk, dh, sq, dp.data(), qh.data(), dkh.data(), false);
          scatter(kn.grad_buffer(), n, h, sk, dkh.data());
        }
      }
  });
}

Var dropout(const Var& x, double p, Rng& rng) {
  require(p >= 0.0 && p < 1.0, "dropout probability must lie in [0, 1)");
  if (p == 0.0) return x;
  const double keep = 1.0 / (1.0 - p);
  std::vector<double> mask(x->value.size());
  for (double& m : mask) m = rng.uniform() < p ? 0.0 : keep;
  Tensor out = x->value;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= mask[i];
  return make_node(std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += self.grad.data[i] * mask[i];
  });
}

Var embedding(const std::vector<int>& tokens, int batch, int steps, const Var& table) {
  require(tokens.size() == static_cast<std::size_t>(batch) * steps, "embedding: token count mismatch");
  const int vocab = table->value.dim(0), d = table->value.dim(1);
  Tensor out({batch, steps, d});
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    require(tokens[i] >= 0 && tokens[i] < vocab, "embedding: token id out of range");
    std::copy_n(table->value.data.data() + static_cast<std::size_t>(tokens[i]) * d, d,
                out.data.data() + i * d);
  }
  return make_node(std::move(out), {table}, [tokens, d](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < tokens.size(); ++i)
      simd::active().axpy_f64(1.0, self.grad.data.data() + i * d, g.data.data() + static_cast<std::size_t>(tokens[i]) * d, d);
  });
}

Var cross_entropy(const Var& logits, const std::vector<int>& targets, int ignore) {
  const Tensor& lv = logits->value;
  const std::size_t vocab = lv.dim(-1);
  const std::size_t rows = lv.rows();
  require(targets.size() == rows, "cross_entropy: target count mismatch");
  std::vector<double> soft(lv.size(), 0.0);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (targets[r] == ignore) continue;
    require(targets[r] >= 0 && static_cast<std::size_t>(targets[r]) < vocab, "cross_entropy: target out of range");
    const double* row = lv.data.data() + r * vocab;
    const double mx = *std::max_element(row, row + vocab);
    double sum = 0.0;
    for (std::size_t j = 0; j < vocab; ++j) sum += std::exp(row[j] - mx);
    const double lse = mx + std::log(sum);
    total += lse - row[targets[r]];
    for (std::size_t j = 0; j < vocab; ++j) soft[r * vocab + j] = std::exp(row[j] - lse);
    ++count;
  }
  const double denom = count ? static_cast<double>(count) : 1.0;
  Tensor out({1}, total / denom);
  return make_node(std::move(out), {logits}, [targets, ignore, vocab, rows, denom, soft = std::move(soft)](Node& self) {
    Tensor& g = self.parents[0]->grad_buffer();
    const double up = self.grad.data[0] / denom;
    for (std::size_t r = 0; r < rows; ++r) {
      if (targets[r] == ignore) continue;
      for (std::size_t j = 0; j < vocab; ++j) g.data[r * vocab + j] += up * soft[r * vocab + j];
      g.data[r * vocab + targets[r]] -= up;
    }
  });
}

}  // namespace invizo::nn
