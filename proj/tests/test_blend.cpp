#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mpano/blend.hpp"
#include "mpano/error.hpp"
#include "test_util.hpp"

using namespace mpano;
using mpano::testing::expect_error;

namespace {

RgbImage random_rgb(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> d(0, 255);
  RgbImage img(w, h, 3);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
  return img;
}

int max_abs_diff(const RgbImage& a, const RgbImage& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(int(a.data()[i]) - int(b.data()[i])));
  return m;
}

// Direct 5x5 binomial convolution with reflect-101 borders.
float filter5_at(const FloatImage& m, int x, int y) {
  static const float t[5] = {1, 4, 6, 4, 1};
  auto refl = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  float s = 0;
  for (int j = -2; j <= 2; ++j)
    for (int i = -2; i <= 2; ++i)
      s += t[i + 2] * t[j + 2] * m.at(refl(x + i, m.width()), refl(y + j, m.height()));
  return s / 256.0f;
}

}  // namespace

TEST(Pyramid, SingleLevelIsTheImage) {
  std::mt19937_64 rng(1);
  const RgbImage img = random_rgb(rng, 9, 7);
  const Pyramids p = build_pyramids(img, 1);
  ASSERT_EQ(p.laplacian.levels.size(), 1u);
  EXPECT_EQ(p.laplacian.levels[0], to_float(img));
}

TEST(Pyramid, ConstantImageHasOnlyLowBand) {
  const RgbImage img(32, 24, 3, 77);
  const Pyramids p = build_pyramids(img, 4);
  ASSERT_EQ(p.laplacian.levels.size(), 4u);
  for (int i = 0; i < 3; ++i)
    for (float v : p.laplacian.levels[i].data()) EXPECT_NEAR(v, 0.0f, 1e-4);
  for (float v : p.laplacian.levels[3].data()) EXPECT_NEAR(v, 77.0f, 1e-4);
}

TEST(Pyramid, LevelSizesRoundUp) {
  const Pyramids p = build_pyramids(RgbImage(13, 9, 3), 3);
  EXPECT_EQ(p.gaussian.levels[1].width(), 7);
  EXPECT_EQ(p.gaussian.levels[1].height(), 5);
  EXPECT_EQ(p.gaussian.levels[2].width(), 4);
  EXPECT_EQ(p.gaussian.levels[2].height(), 3);
}

TEST(Pyramid, TooManyLevels) {
  expect_error(ErrorCode::kTooManyLevels, [] { build_pyramids(RgbImage(16, 7, 3), 4); });
  EXPECT_NO_THROW(build_pyramids(RgbImage(16, 8, 3), 4));
}

TEST(Pyramid, CollapseReconstructsRandomImages) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const RgbImage img = random_rgb(rng, 64, 64);
    for (int levels : {1, 3, 7}) EXPECT_LE(max_abs_diff(quantize(collapse(build_pyramids(img, levels).laplacian)), img), 1);
  }
}

TEST(Blend, IdenticalInputsAreIdentity) {
  std::mt19937_64 rng(3);
  const RgbImage img = random_rgb(rng, 40, 30);
  Mask m(40, 30);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) m.at(x, y) = (x * 7 + y * 3) % 5 < 2;
  for (int levels : {1, 2, 4}) EXPECT_LE(max_abs_diff(multiband_blend(img, img, m, levels), img), 1);
}

TEST(Blend, AllOnesMaskSelectsFirstImage) {
  std::mt19937_64 rng(4);
  const RgbImage a = random_rgb(rng, 32, 32), b = random_rgb(rng, 32, 32);
  EXPECT_LE(max_abs_diff(multiband_blend(a, b, Mask(32, 32, 1, 1), 4), a), 1);
  EXPECT_LE(max_abs_diff(multiband_blend(a, b, Mask(32, 32, 1, 0), 4), b), 1);
}

TEST(Blend, SingleBandIsFilteredMaskMix) {
  std::mt19937_64 rng(5);
  const RgbImage a = random_rgb(rng, 20, 12), b = random_rgb(rng, 20, 12);
  Mask m(20, 12);
  FloatImage mf(20, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 20; ++x) {
      m.at(x, y) = x + y < 14;
      mf.at(x, y) = m.at(x, y);
    }
  const RgbImage out = multiband_blend(a, b, m, 1);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 20; ++x) {
      const float wv = filter5_at(mf, x, y);
      for (int c = 0; c < 3; ++c) {
        const double expect = std::round(wv * a.at(x, y, c) + (1 - wv) * b.at(x, y, c));
        EXPECT_NEAR(out.at(x, y, c), expect, 1.0) << x << "," << y;
      }
    }
}

TEST(Blend, DimensionMismatch) {
  expect_error(ErrorCode::kDimensionMismatch,
               [] { multiband_blend(RgbImage(4, 4, 3), RgbImage(4, 5, 3), Mask(4, 4), 1); });
}

TEST(Blend, ScalingInputsScalesOutput) {
  std::mt19937_64 rng(6);
  const RgbImage a = random_rgb(rng, 32, 32), b = random_rgb(rng, 32, 32);
  Mask m(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) m.at(x, y) = x < 16;
  // factor 0.5, applied to even values so the halved inputs stay exact
  RgbImage a2 = a, b2 = b, a_even = a, b_even = b;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    a_even.data()[i] = a.data()[i] & 0xFE;
    b_even.data()[i] = b.data()[i] & 0xFE;
    a2.data()[i] = a_even.data()[i] / 2;
    b2.data()[i] = b_even.data()[i] / 2;
  }
  const RgbImage whole = multiband_blend(a_even, b_even, m, 3);
  const RgbImage half = multiband_blend(a2, b2, m, 3);
  // quantization clamps overshoot at 255, where linearity cannot hold
  for (std::size_t i = 0; i < whole.data().size(); ++i) {
    if (whole.data()[i] == 255) continue;
    EXPECT_NEAR(2.0 * half.data()[i], whole.data()[i], 2.0);
  }
}

TEST(Blend, DefaultLevels) {
  EXPECT_EQ(default_blend_levels(64, 64), 2);
  EXPECT_EQ(default_blend_levels(20, 500), 1);
  EXPECT_EQ(default_blend_levels(1024, 4096), 6);
}

TEST(Blend, FarFromSeamKeepsSource) {
  std::mt19937_64 rng(7);
  const int n = 96;
  const RgbImage a = random_rgb(rng, n, n), b = random_rgb(rng, n, n);
  Mask m(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) m.at(x, y) = x < n / 2;
  for (int levels : {1, 2, 3}) {
    const RgbImage out = multiband_blend(a, b, m, levels);
    // the mask pyramid mixes within about 2, 10 and 22 px of the seam for 1, 2, 3 levels
    const int d_min = 3 << levels;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const int d = x < n / 2 ? n / 2 - x : x - n / 2 + 1;
        if (d < d_min) continue;
        const RgbImage& src = x < n / 2 ? a : b;
        for (int c = 0; c < 3; ++c)
          ASSERT_LE(std::abs(int(out.at(x, y, c)) - int(src.at(x, y, c))), 1)
              << "levels " << levels << " at " << x << "," << y;
      }
  }
}
