#pragma once

// Data-parallel inner loops shared by imaging, registration and the
// recognizer. Every kernel exists as a scalar reference and, on x86-64, an
// AVX2 variant; the active table is picked once at startup.
//
// Reductions (dot, squared distance) accumulate in a fixed number of virtual
// lanes and combine them in a fixed order, and no kernel fuses multiply-add,
// so the scalar and vector variants return bit-identical results.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace invizo::simd {

inline constexpr std::size_t kDotLanesF64 = 8;
inline constexpr std::size_t kDistLanesF32 = 8;

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n], all row-major and contiguous. Every
  // C element adds its k products one at a time in increasing k order.
  void (*gemm_f64)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
  // y[i] += alpha * x[i]
  void (*axpy_f32)(float alpha, const float* x, float* y, std::size_t n);
  // sum_i (a[i] - b[i])^2
  float (*sq_dist_f32)(const float* a, const float* b, std::size_t n);
  // out[i] = (a[i] - b[i])^2
  void (*sq_diff_i32)(const std::int32_t* a, const std::int32_t* b, std::int32_t* out,
                      std::size_t n);
  // acc[i] += add[i] - sub[i]
  void (*add_sub_i32)(std::int32_t* acc, const std::int32_t* add, const std::int32_t* sub,
                      std::size_t n);
};

const KernelTable& scalar_kernels();

// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

// The table used by the library. Defaults to the best variant the CPU
// supports; INVIZO_SIMD=scalar in the environment forces the reference path.
const KernelTable& active();

// Overrides the active table (tests, benchmarks). Not thread-safe against
// concurrent kernel use.
void set_active(const KernelTable& table);

}  // namespace invizo::simd
