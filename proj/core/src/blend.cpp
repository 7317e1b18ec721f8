#include "mpano/blend.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpano/error.hpp"

namespace mpano {

namespace {

constexpr float kTaps[5] = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16, 1.0f / 16};

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

FloatImage filter_scaled(const FloatImage& img, float scale) {
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  FloatImage tmp(w, h, ch);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c) {
        float s = 0.0f;
        for (int k = -2; k <= 2; ++k) s += kTaps[k + 2] * img.at(reflect101(x + k, w), y, c);
        tmp.at(x, y, c) = s * scale;
      }
  FloatImage out(w, h, ch);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c) {
        float s = 0.0f;
        for (int k = -2; k <= 2; ++k) s += kTaps[k + 2] * tmp.at(x, reflect101(y + k, h), c);
        out.at(x, y, c) = s * scale;
      }
  return out;
}

FloatImage decimate(const FloatImage& img) {
  const int w = (img.width() + 1) / 2;
  const int h = (img.height() + 1) / 2;
  FloatImage out(w, h, img.channels());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(2 * x, 2 * y, c);
  return out;
}

}  // namespace

FloatImage to_float(const Raster<std::uint8_t>& img) {
  FloatImage out(img.width(), img.height(), img.channels());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  return out;
}

Raster<std::uint8_t> quantize(const FloatImage& img) {
  Raster<std::uint8_t> out(img.width(), img.height(), img.channels());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double r = std::round(static_cast<double>(src[i]));  // half away from zero
    dst[i] = static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
  }
  return out;
}

FloatImage binomial_filter(const FloatImage& img) { return filter_scaled(img, 1.0f); }

FloatImage pyr_down(const FloatImage& img) { return decimate(binomial_filter(img)); }

FloatImage pyr_up(const FloatImage& img, int width, int height) {
  FloatImage up(width, height, img.channels());
  for (int y = 0; y < img.height() && 2 * y < height; ++y)
    for (int x = 0; x < img.width() && 2 * x < width; ++x)
      for (int c = 0; c < img.channels(); ++c) up.at(2 * x, 2 * y, c) = img.at(x, y, c);
  return filter_scaled(up, 2.0f);
}

Pyramids build_pyramids(const FloatImage& img, int levels) {
  if (levels < 1) throw Error(ErrorCode::kInvalidArgument, "pyramid needs at least one level");
  const long long min_side = std::min(img.width(), img.height());
  if (levels > 31 || min_side < (1LL << (levels - 1))) {
    throw Error(ErrorCode::kTooManyLevels, std::to_string(levels) + " levels do not fit a " +
                                               std::to_string(img.width()) + "x" +
                                               std::to_string(img.height()) + " image");
  }
  Pyramids p;
  p.gaussian.kind = PyramidKind::kGaussian;
  p.laplacian.kind = PyramidKind::kLaplacian;
  p.gaussian.levels.push_back(img);
  for (int i = 1; i < levels; ++i) p.gaussian.levels.push_back(pyr_down(p.gaussian.levels.back()));

  for (int i = 0; i + 1 < levels; ++i) {
    const FloatImage& g = p.gaussian.levels[i];
    FloatImage lap = pyr_up(p.gaussian.levels[i + 1], g.width(), g.height());
    auto l = lap.data();
    auto s = g.data();
    for (std::size_t k = 0; k < l.size(); ++k) l[k] = s[k] - l[k];
    p.laplacian.levels.push_back(std::move(lap));
  }
  p.laplacian.levels.push_back(p.gaussian.levels.back());
  return p;
}

Pyramids build_pyramids(const RgbImage& img, int levels) { return build_pyramids(to_float(img), levels); }

FloatImage collapse(const ImagePyramid& lap) {
  if (lap.levels.empty()) throw Error(ErrorCode::kInvalidArgument, "empty pyramid");
  FloatImage acc = lap.levels.back();
  for (int i = static_cast<int>(lap.levels.size()) - 2; i >= 0; --i) {
    const FloatImage& band = lap.levels[i];
    FloatImage up = pyr_up(acc, band.width(), band.height());
    auto u = up.data();
    auto b = band.data();
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += b[k];
    acc = std::move(up);
  }
  return acc;
}

int default_blend_levels(int width, int height) {
  const int m = std::min(width, height);
  if (m < 1) return 1;
  return std::max(1, static_cast<int>(std::floor(std::log2(double(m)))) - 4);
}

RgbImage multiband_blend(const RgbImage& img1, const RgbImage& img2, const Mask& mask, int levels) {
  if (!img1.same_size(img2) || !img1.same_size(mask) || img1.channels() != img2.channels()) {
    throw Error(ErrorCode::kDimensionMismatch, "blend inputs must share dimensions");
  }
  const Pyramids p1 = build_pyramids(img1, levels);
  const Pyramids p2 = build_pyramids(img2, levels);

  // Mask weights per level: the blurred mask, decimated between levels.
  FloatImage m(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) m.at(x, y) = mask.at(x, y) != 0 ? 1.0f : 0.0f;

  ImagePyramid out;
  out.kind = PyramidKind::kLaplacian;
  for (int i = 0; i < levels; ++i) {
    const FloatImage weight = binomial_filter(m);
    const FloatImage& a = p1.laplacian.levels[i];
    const FloatImage& b = p2.laplacian.levels[i];
    FloatImage band(a.width(), a.height(), a.channels());
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) {
        const float wv = weight.at(x, y);
        for (int c = 0; c < a.channels(); ++c)
          band.at(x, y, c) = wv * a.at(x, y, c) + (1.0f - wv) * b.at(x, y, c);
      }
    out.levels.push_back(std::move(band));
    if (i + 1 < levels) m = decimate(weight);
  }
  return quantize(collapse(out));
}

}  // namespace mpano
