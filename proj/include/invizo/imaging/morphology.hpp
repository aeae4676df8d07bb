#pragma once

#include "invizo/imaging/raster.hpp"

namespace invizo {

// 3x3 all-ones structuring element; foreground is 255. Pixels outside the
// image never take part (erosion sees only in-bounds neighbours, dilation
// treats the outside as background), so erode(invert(I)) ==
// invert(dilate(I)) holds up to the border.
RasterImage erode(const RasterImage& binary);
RasterImage dilate(const RasterImage& binary);

// dilate(erode(I)): removes foreground specks narrower than 3 px.
RasterImage open(const RasterImage& binary);

}  // namespace invizo
