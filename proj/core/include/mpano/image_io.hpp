#pragma once

#include <filesystem>

#include "mpano/raster.hpp"
#include "mpano/seam.hpp"

namespace mpano {

// 8-bit PNG, 3 channels (RGB) or 1 channel (gray).
void write_png(const Raster<std::uint8_t>& img, const std::filesystem::path& path);
// Gray, gray+alpha, palette and RGBA inputs are converted to 3-channel RGB.
RgbImage read_rgb_png(const std::filesystem::path& path);

inline constexpr double kDepthUnitsPerMeter = 1000.0;  // 1 mm quantization

// 16-bit single-channel PNG, value = round(depth * 1000), 0 = invalid.
// Throws kOutOfRange for depths that do not fit 16 bits.
void write_depth_png(const DepthImage& depth, const std::filesystem::path& path);
// Rejects anything but 16-bit single-channel PNGs.
DepthImage read_depth_png(const std::filesystem::path& path);

// Debug dumps of a seam search: 0/255 label image (255 = image 1) and a text
// list of "x0 y0 x1 y1" pairs in rect-local coordinates.
void write_labeling_png(const SeamLabeling& labeling, const std::filesystem::path& path);
void write_seam_pairs(const std::vector<SeamPair>& pairs, const std::filesystem::path& path);

}  // namespace mpano
