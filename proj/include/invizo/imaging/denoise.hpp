#pragma once

#include <vector>

#include "invizo/imaging/raster.hpp"

namespace invizo {

struct FnlmParams {
  int patch_radius = 3;
  int search_radius = 10;
  double h = 10.0;
};

// Optional instrumentation: for every pixel, the sum over the search window
// of the normalized weights K(x,y) / C(x), recomputed from the stored raw
// weights after C(x) is known.
struct FnlmProbe {
  std::vector<double> normalized_weight_sum;
};

// Non-local means over a clamped search window. Patch distance is the mean
// squared intensity difference over the (2r+1)^2 patch (replicated borders);
// K = exp(-d / h^2). The centre pixel takes the largest weight found among
// the other candidates (1 when it has none). Distances are evaluated for one
// search offset at a time with running box sums, so the cost does not grow
// with the patch size.
RasterImage fnlm_denoise(const RasterImage& gray, const FnlmParams& params = {},
                         FnlmProbe* probe = nullptr);

}  // namespace invizo
