#include "invizo/simd/kernels.hpp"

#include <array>

namespace invizo::simd {
namespace {

// Lane k accumulates elements k, k+L, k+2L, ... of the blocked prefix; lanes
// are then folded pairwise. This is the order the AVX2 variant produces.
double dot_f64(const double* a, const double* b, std::size_t n) {
  std::array<double, kDotLanesF64> acc{};
  const std::size_t blocked = n - n % kDotLanesF64;
  for (std::size_t i = 0; i < blocked; i += kDotLanesF64)
    for (std::size_t k = 0; k < kDotLanesF64; ++k) acc[k] = acc[k] + a[i + k] * b[i + k];
  // two 4-lane registers are added, then the 4 lanes reduced as (0+2)+(1+3)
  std::array<double, 4> q{};
  for (std::size_t k = 0; k < 4; ++k) q[k] = acc[k] + acc[k + 4];
  double total = (q[0] + q[2]) + (q[1] + q[3]);
  for (std::size_t i = blocked; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void gemm_f64(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double alpha = a[i * k + p];
      const double* brow = b + p * n;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + alpha * brow[j];
    }
}

void axpy_f32(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

float sq_dist_f32(const float* a, const float* b, std::size_t n) {
  std::array<float, kDistLanesF32> acc{};
  const std::size_t blocked = n - n % kDistLanesF32;
  for (std::size_t i = 0; i < blocked; i += kDistLanesF32)
    for (std::size_t k = 0; k < kDistLanesF32; ++k) {
      const float d = a[i + k] - b[i + k];
      acc[k] = acc[k] + d * d;
    }
  // 8 -> 4 -> 2 -> 1, matching the AVX2 horizontal reduction
  std::array<float, 4> q{};
  for (std::size_t k = 0; k < 4; ++k) q[k] = acc[k] + acc[k + 4];
  float total = (q[0] + q[2]) + (q[1] + q[3]);
  for (std::size_t i = blocked; i < n; ++i) {
    const float d = a[i] - b[i];
    total = total + d * d;
  }
  return total;
}

void sq_diff_i32(const std::int32_t* a, const std::int32_t* b, std::int32_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t d = a[i] - b[i];
    out[i] = d * d;
  }
}

void add_sub_i32(std::int32_t* acc, const std::int32_t* add, const std::int32_t* sub,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += add[i] - sub[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",    dot_f64,     axpy_f64,   gemm_f64,
                                 axpy_f32,    sq_dist_f32, sq_diff_i32, add_sub_i32};
  return table;
}

}  // namespace invizo::simd
