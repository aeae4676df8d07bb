#include "invizo/simd/gemm.hpp"

#include <algorithm>
#include <vector>

#include "invizo/simd/kernels.hpp"

namespace invizo::simd {
namespace {

// Row-major rows x cols source read as its transpose.
void transpose_into(const double* src, std::size_t rows, std::size_t cols, std::vector<double>& dst) {
  dst.resize(rows * cols);
  constexpr std::size_t kBlock = 32;
  for (std::size_t r0 = 0; r0 < rows; r0 += kBlock)
    for (std::size_t c0 = 0; c0 < cols; c0 += kBlock)
      for (std::size_t r = r0; r < std::min(rows, r0 + kBlock); ++r)
        for (std::size_t c = c0; c < std::min(cols, c0 + kBlock); ++c) dst[c * rows + r] = src[r * cols + c];
}

// Column panel width keeping a k x panel slice of B cache resident.
constexpr std::size_t kPanel = 256;

}  // namespace

void gemm(Transpose ta, Transpose tb, std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, 0.0);
  if (m == 0 || n == 0 || k == 0) return;

  std::vector<double> a_buf, b_buf;
  if (ta == Transpose::Yes) {
    transpose_into(a, k, m, a_buf);
    a = a_buf.data();
  }
  if (tb == Transpose::Yes) {
    transpose_into(b, n, k, b_buf);
    b = b_buf.data();
  }
  const KernelTable& kt = active();
  if (n <= kPanel) {
    kt.gemm_f64(m, n, k, a, b, c);
    return;
  }
  // Panels of B and C copied out so the kernel sees contiguous rows.
  std::vector<double> bp, cp;
  for (std::size_t j0 = 0; j0 < n; j0 += kPanel) {
    const std::size_t w = std::min(kPanel, n - j0);
    bp.resize(k * w);
    cp.resize(m * w);
    for (std::size_t p = 0; p < k; ++p) std::copy_n(b + p * n + j0, w, bp.data() + p * w);
    for (std::size_t i = 0; i < m; ++i) std::copy_n(c + i * n + j0, w, cp.data() + i * w);
    kt.gemm_f64(m, w, k, a, bp.data(), cp.data());
    for (std::size_t i = 0; i < m; ++i) std::copy_n(cp.data() + i * w, w, c + i * n + j0);
  }
}

}  // namespace invizo::simd
