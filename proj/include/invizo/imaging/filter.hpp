#pragma once

#include <vector>

#include "invizo/imaging/raster.hpp"

namespace invizo {

// Normalized sampled Gaussian, radius ceil(3 sigma).
std::vector<float> gaussian_kernel(double sigma);

// Symmetric reflection (... c b a | a b c ... ) of an index into [0, n).
int reflect_index(int i, int n) noexcept;

// Separable Gaussian with reflected borders.
FloatImage gaussian_blur(const FloatImage& plane, double sigma);
RasterImage gaussian_blur(const RasterImage& img, double sigma);

// Separable convolution with an odd-length kernel along rows, then columns.
FloatImage convolve_separable(const FloatImage& plane, const std::vector<float>& row_kernel,
                              const std::vector<float>& col_kernel);

}  // namespace invizo
