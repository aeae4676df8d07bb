#pragma once

#include "invizo/imaging/raster.hpp"

namespace invizo {

// round(0.299 R + 0.587 G + 0.114 B); single-channel input is returned as is.
RasterImage to_grayscale(const RasterImage& img);

// Replicates a gray plane into three channels.
RasterImage gray_to_rgb(const RasterImage& gray);

}  // namespace invizo
