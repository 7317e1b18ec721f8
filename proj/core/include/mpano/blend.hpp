#pragma once

#include <vector>

#include "mpano/raster.hpp"

namespace mpano {

using FloatImage = Raster<float>;

enum class PyramidKind { kGaussian, kLaplacian };

struct ImagePyramid {
  PyramidKind kind = PyramidKind::kGaussian;
  std::vector<FloatImage> levels;  // level 0 is full resolution
};

struct Pyramids {
  ImagePyramid gaussian;
  ImagePyramid laplacian;
};

FloatImage to_float(const Raster<std::uint8_t>& img);
// Rounds half away from zero and clamps to [0, 255].
Raster<std::uint8_t> quantize(const FloatImage& img);

// Separable (1 4 6 4 1)/16 filter with reflect-101 borders.
FloatImage binomial_filter(const FloatImage& img);
// Filter, then keep every second sample; odd sizes round up.
FloatImage pyr_down(const FloatImage& img);
// Zero-insertion to width x height followed by the binomial filter scaled by 4.
FloatImage pyr_up(const FloatImage& img, int width, int height);

// Throws kTooManyLevels when min(width, height) < 2^(levels - 1).
Pyramids build_pyramids(const FloatImage& img, int levels);
Pyramids build_pyramids(const RgbImage& img, int levels);
FloatImage collapse(const ImagePyramid& laplacian);

// max(1, floor(log2(min(w, h))) - 4)
int default_blend_levels(int width, int height);

// Multi-band blend; mask != 0 selects img1.
RgbImage multiband_blend(const RgbImage& img1, const RgbImage& img2, const Mask& mask, int levels);

}  // namespace mpano
