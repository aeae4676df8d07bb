#pragma once

#include "invizo/core/geometry.hpp"
#include "invizo/imaging/raster.hpp"

namespace invizo::registration {

// Output size for a quad: rounded mean of opposite edge lengths (>= 1).
struct ExtractSize {
  int width = 0;
  int height = 0;
};
ExtractSize extract_size(const Quad& quad);

// Rectifies the quad (clockwise from its top-left vertex; counter-clockwise
// input is reordered) to an axis-aligned image by inverse mapping with
// bilinear sampling. Samples falling outside `img` read as 255. Throws
// DegenerateRegion when the quad area is below 4 px^2 or it is not simple.
RasterImage warp_extract(const RasterImage& img, const Quad& quad);

}  // namespace invizo::registration
