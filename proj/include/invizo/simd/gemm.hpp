#pragma once

#include <cstddef>

namespace invizo::simd {

enum class Transpose { No, Yes };

// Row-major C[m x n] (+)= op(A)[m x k] * op(B)[k x n]. With Transpose::Yes the
// operand is stored as its transpose (A as k x m, B as n x k).
void gemm(Transpose ta, Transpose tb, std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double* c, bool accumulate);

}  // namespace invizo::simd
