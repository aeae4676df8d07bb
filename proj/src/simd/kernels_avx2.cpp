#include <immintrin.h>

#include "invizo/simd/kernels.hpp"

namespace invizo::simd {
namespace {

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  const std::size_t blocked = n - n % kDotLanesF64;
  for (std::size_t i = 0; i < blocked; i += kDotLanesF64) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  const __m256d q = _mm256_add_pd(acc0, acc1);
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(q), _mm256_extractf128_pd(q, 1));
  double total = _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
  for (std::size_t i = blocked; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

// Tiles of R rows by 8 columns held in registers across the whole k loop.
template <std::size_t R>
void gemm_tile(std::size_t n, std::size_t k, const double* a, const double* b, double* c, std::size_t j) {
  __m256d lo[R], hi[R];
  for (std::size_t r = 0; r < R; ++r) {
    lo[r] = _mm256_loadu_pd(c + r * n + j);
    hi[r] = _mm256_loadu_pd(c + r * n + j + 4);
  }
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * n + j);
    const __m256d b1 = _mm256_loadu_pd(b + p * n + j + 4);
    for (std::size_t r = 0; r < R; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * k + p);
      lo[r] = _mm256_add_pd(lo[r], _mm256_mul_pd(av, b0));
      hi[r] = _mm256_add_pd(hi[r], _mm256_mul_pd(av, b1));
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    _mm256_storeu_pd(c + r * n + j, lo[r]);
    _mm256_storeu_pd(c + r * n + j + 4, hi[r]);
  }
}

template <std::size_t R>
void gemm_rows(std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) gemm_tile<R>(n, k, a, b, c, j);
  if (j == n) return;
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t p = 0; p < k; ++p) {
      const double alpha = a[r * k + p];
      for (std::size_t jj = j; jj < n; ++jj) c[r * n + jj] = c[r * n + jj] + alpha * b[p * n + jj];
    }
}

void gemm_f64(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) gemm_rows<4>(n, k, a + i * k, b, c + i * n);
  for (; i < m; ++i) gemm_rows<1>(n, k, a + i * k, b, c + i * n);
}

void axpy_f32(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vy = _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

float sq_dist_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  const std::size_t blocked = n - n % kDistLanesF32;
  for (std::size_t i = 0; i < blocked; i += kDistLanesF32) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    acc = _mm256_add_ps(acc, _mm256_mul_ps(d, d));
  }
  const __m128 q = _mm_add_ps(_mm256_castps256_ps128(acc), _mm256_extractf128_ps(acc, 1));
  const __m128 s = _mm_add_ps(q, _mm_movehl_ps(q, q));
  float total = _mm_cvtss_f32(_mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55)));
  for (std::size_t i = blocked; i < n; ++i) {
    const float d = a[i] - b[i];
    total = total + d * d;
  }
  return total;
}

void sq_diff_i32(const std::int32_t* a, const std::int32_t* b, std::int32_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i d = _mm256_sub_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)),
                                       _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_mullo_epi32(d, d));
  }
  for (; i < n; ++i) {
    const std::int32_t d = a[i] - b[i];
    out[i] = d * d;
  }
}

void add_sub_i32(std::int32_t* acc, const std::int32_t* add, const std::int32_t* sub,
                 std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i delta =
        _mm256_sub_epi32(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(add + i)),
                         _mm256_loadu_si256(reinterpret_cast<const __m256i*>(sub + i)));
    __m256i* dst = reinterpret_cast<__m256i*>(acc + i);
    _mm256_storeu_si256(dst, _mm256_add_epi32(_mm256_loadu_si256(dst), delta));
  }
  for (; i < n; ++i) acc[i] += add[i] - sub[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2",      dot_f64,     axpy_f64,   gemm_f64,
                                 axpy_f32,    sq_dist_f32, sq_diff_i32, add_sub_i32};
  return table;
}

}  // namespace invizo::simd
