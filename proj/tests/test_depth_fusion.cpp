#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "mpano/depth_fusion.hpp"
#include "mpano/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mpano;
using mpano::testing::expect_error;

namespace {

CameraIntrinsics vga() { return {500.0, 500.0, 320.0, 240.0, 640, 480}; }

// Camera at the origin looking along +X, image x to -Y, image y to -Z.
Mat3 looking_plus_x() {
  Mat3 r;
  r << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  return r;
}

RgbImage uniform_guide(int w, int h, std::uint8_t v = 128) { return RgbImage(w, h, 3, v); }

// Literal evaluation of the kernel: sum over all samples in range, sigma from
// a full sort of the in-range distances.
double kernel_oracle(const DepthImage& sparse, const RgbImage& guide, const DensifyParams& p, int x, int y) {
  std::vector<std::pair<double, double>> near;  // (distance, depth)
  std::vector<std::array<int, 2>> where;
  for (int sy = 0; sy < sparse.height(); ++sy)
    for (int sx = 0; sx < sparse.width(); ++sx) {
      if (!sparse.valid(sx, sy)) continue;
      const double d = std::hypot(sx - x, sy - y);
      if (d <= p.max_radius) {
        near.push_back({d, sparse.at(sx, sy)});
        where.push_back({sx, sy});
      }
    }
  if (near.empty()) return 0.0;
  std::vector<double> ds;
  for (auto& n : near) ds.push_back(n.first);
  std::sort(ds.begin(), ds.end());
  const double sigma = 0.5 * ds[std::min<std::size_t>(p.k_nearest, ds.size()) - 1];
  double num = 0, den = 0;
  for (std::size_t i = 0; i < near.size(); ++i) {
    double c2 = 0;
    for (int c = 0; c < 3; ++c) {
      const double dc = double(guide.at(x, y, c)) - guide.at(where[i][0], where[i][1], c);
      c2 += dc * dc;
    }
    const double w = std::exp(-near[i].first * near[i].first / (2 * sigma * sigma)) *
                     std::exp(-c2 / (2 * p.sigma_color * p.sigma_color));
    num += w * near[i].second;
    den += w;
  }
  return num / den;
}

}  // namespace

TEST(ProjectSparseDepth, SinglePoint) {
  const DepthImage d = project_sparse_depth({{Vec3(0, 0, 2)}}, vga(), RigidTransform{});
  EXPECT_DOUBLE_EQ(d.at(320, 240), 2.0);
  EXPECT_EQ(d.valid_count(), 1u);
}

TEST(ProjectSparseDepth, KeepsSmallestDepth) {
  const DepthImage d = project_sparse_depth({{Vec3(0, 0, 5), Vec3(0, 0, 2)}}, vga(), RigidTransform{});
  EXPECT_DOUBLE_EQ(d.at(320, 240), 2.0);
}

TEST(ProjectSparseDepth, BehindCameraIgnored) {
  const DepthImage d = project_sparse_depth({{Vec3(0, 0, -1)}}, vga(), RigidTransform{});
  EXPECT_EQ(d.valid_count(), 0u);
}

TEST(ProjectSparseDepth, EmptyCloudThrows) {
  expect_error(ErrorCode::kEmptyCloud, [] { project_sparse_depth({}, vga(), RigidTransform{}); });
}

TEST(ProjectSparseDepth, MatchesPerPixelMinimumOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> xy(-1.0, 1.0), z(-0.5, 4.0);
  const CameraIntrinsics k{40.0, 40.0, 15.5, 11.5, 32, 24};
  PointCloud cloud;
  for (int i = 0; i < 1000; ++i) cloud.points.push_back({xy(rng), xy(rng), z(rng)});
  const RigidTransform pose(axis_angle(Vec3(0.2, 1, 0.1).normalized(), 0.3), Vec3(0.1, 0, 0.5));
  const DepthImage d = project_sparse_depth(cloud, k, pose);

  std::map<std::pair<int, int>, double> oracle;
  for (const Vec3& p : cloud.points) {
    const Vec3 c = pose.rotation() * p + pose.translation();
    if (c.z() <= 0) continue;
    const long u = std::lround(k.fx * c.x() / c.z() + k.u0);
    const long v = std::lround(k.fy * c.y() / c.z() + k.v0);
    if (u < 0 || v < 0 || u >= k.width || v >= k.height) continue;
    auto key = std::make_pair(int(u), int(v));
    auto it = oracle.find(key);
    if (it == oracle.end() || c.z() < it->second) oracle[key] = c.z();
  }
  EXPECT_EQ(d.valid_count(), oracle.size());
  for (const auto& [key, z_min] : oracle) EXPECT_NEAR(d.at(key.first, key.second), z_min, 1e-9);
}

TEST(ProjectSparseDepth, LargerCloudNeverRaisesOrClearsPixel) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> xy(-1.0, 1.0), z(0.5, 4.0);
  const CameraIntrinsics k{40.0, 40.0, 15.5, 11.5, 32, 24};
  PointCloud a;
  for (int i = 0; i < 300; ++i) a.points.push_back({xy(rng), xy(rng), z(rng)});
  PointCloud b = a;
  for (int i = 0; i < 300; ++i) b.points.push_back({xy(rng), xy(rng), z(rng)});
  const DepthImage da = project_sparse_depth(a, k, RigidTransform{});
  const DepthImage db = project_sparse_depth(b, k, RigidTransform{});
  for (int y = 0; y < k.height; ++y)
    for (int x = 0; x < k.width; ++x)
      if (da.valid(x, y)) {
        ASSERT_TRUE(db.valid(x, y));
        ASSERT_LE(db.at(x, y), da.at(x, y));
      }
}

TEST(Densify, FullyValidInputUnchanged) {
  DepthImage d(5, 4);
  for (double& v : d.data()) v = 1.5;
  d.at(2, 2) = 3.0;
  EXPECT_EQ(densify(d, uniform_guide(5, 4)), d);
}

TEST(Densify, SingleSampleSpreadsExactly) {
  DepthImage d(40, 30);
  d.at(20, 15) = 2.75;
  DensifyParams p;
  p.max_radius = 10;
  const DepthImage out = densify(d, uniform_guide(40, 30), p);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) {
      if (std::hypot(x - 20, y - 15) <= 10) {
        EXPECT_DOUBLE_EQ(out.at(x, y), 2.75) << x << "," << y;
      } else {
        EXPECT_FALSE(out.valid(x, y));
      }
    }
}

TEST(Densify, HardColorEdgeKeepsSidesApart) {
  const int w = 20, h = 9;
  RgbImage guide(w, h, 3, 0);
  for (int y = 0; y < h; ++y)
    for (int x = w / 2; x < w; ++x)
      for (int c = 0; c < 3; ++c) guide.at(x, y, c) = 255;
  DepthImage d(w, h);
  d.at(2, 4) = 1.0;
  d.at(17, 4) = 5.0;
  DensifyParams p;
  p.sigma_color = 10;
  p.max_radius = 30;
  const DepthImage out = densify(d, guide, p);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w / 2; ++x) EXPECT_NEAR(out.at(x, y), 1.0, 0.1) << x << "," << y;
}

TEST(Densify, MatchesLiteralKernelWithoutDiffusion) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> col(0, 255);
  std::uniform_real_distribution<double> dep(0.5, 8.0), u01(0, 1);
  const int w = 24, h = 18;
  RgbImage guide(w, h, 3);
  for (auto& c : guide.data()) c = static_cast<std::uint8_t>(col(rng));
  DepthImage sparse(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (u01(rng) < 0.08) sparse.at(x, y) = dep(rng);
  sparse.at(0, 0) = 1.0;
  DensifyParams p;
  p.enhancement_iters = 0;
  p.max_radius = 7;
  p.k_nearest = 4;
  p.sigma_color = 60;
  const DepthImage out = densify(sparse, guide, p);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (sparse.valid(x, y)) {
        EXPECT_EQ(out.at(x, y), sparse.at(x, y));
        continue;
      }
      EXPECT_NEAR(out.at(x, y), kernel_oracle(sparse, guide, p, x, y), 1e-9) << x << "," << y;
    }
}

TEST(Densify, OutputStaysWithinSampleRange) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> col(0, 255);
  std::uniform_real_distribution<double> dep(0.5, 8.0), u01(0, 1);
  const int w = 48, h = 32;
  RgbImage guide(w, h, 3);
  for (auto& c : guide.data()) c = static_cast<std::uint8_t>(col(rng));
  DepthImage sparse(w, h);
  double lo = 1e9, hi = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (u01(rng) < 0.05) {
        sparse.at(x, y) = dep(rng);
        lo = std::min(lo, sparse.at(x, y));
        hi = std::max(hi, sparse.at(x, y));
      }
  for (int iters : {0, 5}) {
    DensifyParams p;
    p.enhancement_iters = iters;
    const DepthImage out = densify(sparse, guide, p);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (sparse.valid(x, y)) { EXPECT_EQ(out.at(x, y), sparse.at(x, y)); }
        if (out.valid(x, y)) {
          EXPECT_GE(out.at(x, y), lo - 1e-12);
          EXPECT_LE(out.at(x, y), hi + 1e-12);
        }
      }
  }
}

TEST(Densify, Errors) {
  DepthImage d(4, 4);
  expect_error(ErrorCode::kNoValidSamples, [&] { densify(d, uniform_guide(4, 4)); });
  d.at(1, 1) = 1.0;
  expect_error(ErrorCode::kDimensionMismatch, [&] { densify(d, uniform_guide(5, 4)); });
  DensifyParams bad;
  bad.enhancement_lambda = 1.0;
  expect_error(ErrorCode::kInvalidArgument, [&] { densify(d, uniform_guide(4, 4), bad); });
}

TEST(BuildPanoDepth, EmptyMapsGiveInvalidPano) {
  const std::vector<DepthImage> maps{DepthImage(640, 480)};
  const std::vector<CameraIntrinsics> ks{vga()};
  const std::vector<Pose> poses{{RigidTransform(looking_plus_x(), Vec3::Zero()), FrameConvention::kCameraFromWorld}};
  const Pose vp{RigidTransform{}, FrameConvention::kVirtualFromWorld};
  const DepthImage pano = build_pano_depth(maps, {ks, poses}, vp, PanoGeometry(64, 32));
  EXPECT_EQ(pano.valid_count(), 0u);
}

TEST(BuildPanoDepth, OpticalCenterLandsAtPanoCenter) {
  DepthImage dm(640, 480);
  dm.at(320, 240) = 3.25;
  const std::vector<DepthImage> maps{dm};
  const std::vector<CameraIntrinsics> ks{vga()};
  const std::vector<Pose> poses{{RigidTransform(looking_plus_x(), Vec3::Zero()), FrameConvention::kCameraFromWorld}};
  const Pose vp{RigidTransform{}, FrameConvention::kVirtualFromWorld};
  const DepthImage pano = build_pano_depth(maps, {ks, poses}, vp, PanoGeometry(8192, 4096));
  EXPECT_NEAR(pano.at(4096, 2048), 3.25, 1e-12);
  EXPECT_EQ(pano.valid_count(), 1u);
}

TEST(BuildPanoDepth, OverlapIsArithmeticMean) {
  std::vector<DepthImage> maps(2, DepthImage(640, 480));
  maps[0].at(320, 240) = 2.0;
  maps[1].at(320, 240) = 3.0;
  const std::vector<CameraIntrinsics> ks{vga(), vga()};
  const Pose cam{RigidTransform(looking_plus_x(), Vec3::Zero()), FrameConvention::kCameraFromWorld};
  const std::vector<Pose> poses{cam, cam};
  const Pose vp{RigidTransform{}, FrameConvention::kVirtualFromWorld};
  const DepthImage pano = build_pano_depth(maps, {ks, poses}, vp, PanoGeometry(512, 256));
  EXPECT_DOUBLE_EQ(pano.at(256, 128), 2.5);
}

TEST(BuildPanoDepth, ConventionAndCountChecks) {
  const std::vector<DepthImage> maps{DepthImage(640, 480)};
  const std::vector<CameraIntrinsics> ks{vga()};
  const std::vector<Pose> good{{RigidTransform{}, FrameConvention::kCameraFromWorld}};
  const std::vector<Pose> swapped{{RigidTransform{}, FrameConvention::kVirtualFromWorld}};
  const Pose vp{RigidTransform{}, FrameConvention::kVirtualFromWorld};
  const Pose vp_bad{RigidTransform{}, FrameConvention::kCameraFromWorld};
  const PanoGeometry g(64, 32);
  expect_error(ErrorCode::kFrameConvention, [&] { build_pano_depth(maps, {ks, swapped}, vp, g); });
  expect_error(ErrorCode::kFrameConvention, [&] { build_pano_depth(maps, {ks, good}, vp_bad, g); });
  const std::vector<DepthImage> two(2, DepthImage(640, 480));
  expect_error(ErrorCode::kDimensionMismatch, [&] { build_pano_depth(two, {ks, good}, vp, g); });
}

// Accumulate-then-divide oracle through the world frame.
TEST(BuildPanoDepth, MatchesAccumulateThenDivideOracle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> dep(1.0, 4.0), u01(0, 1);
  const CameraIntrinsics k{20.0, 20.0, 15.5, 11.5, 32, 24};
  const PanoGeometry g(96, 48);
  const RigidTransform vp_t(axis_angle(Vec3::UnitZ(), 0.4), Vec3(0.2, -0.1, 0.3));
  const Pose vp{vp_t, FrameConvention::kVirtualFromWorld};
  std::vector<DepthImage> maps;
  std::vector<CameraIntrinsics> ks;
  std::vector<Pose> poses;
  for (int c = 0; c < 3; ++c) {
    DepthImage dm(k.width, k.height);
    for (double& v : dm.data())
      if (u01(rng) < 0.7) v = dep(rng);
    maps.push_back(dm);
    ks.push_back(k);
    const Mat3 r = looking_plus_x() * axis_angle(Vec3::UnitZ(), -0.5 * c);
    poses.push_back({RigidTransform(r, Vec3(0.05 * c, 0.0, -0.02)), FrameConvention::kCameraFromWorld});
  }
  const DepthImage pano = build_pano_depth(maps, {ks, poses}, vp, g);

  std::map<std::pair<int, int>, std::pair<double, int>> acc;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < k.height; ++y)
      for (int x = 0; x < k.width; ++x) {
        if (!maps[c].valid(x, y)) continue;
        const Vec3 pw = pixel_to_world(x, y, maps[c].at(x, y), k, poses[c].transform);
        const Vec3 pv = vp_t.rotation() * pw + vp_t.translation();
        const double alpha = std::atan2(pv.y(), pv.x());
        const double beta = std::atan2(std::hypot(pv.x(), pv.y()), pv.z());
        long u = std::lround(g.width() * (M_PI - alpha) / (2 * M_PI)) % g.width();
        long v = std::min<long>(std::lround(g.height() * beta / M_PI), g.height() - 1);
        auto& a = acc[{int(u), int(v)}];
        a.first += pv.norm();
        a.second += 1;
      }
  EXPECT_EQ(pano.valid_count(), acc.size());
  for (const auto& [key, a] : acc) EXPECT_NEAR(pano.at(key.first, key.second), a.first / a.second, 1e-9);
}

TEST(FillInvalidDepth, AllValidUnchanged) {
  DepthImage d(6, 5);
  for (double& v : d.data()) v = 4.0;
  EXPECT_EQ(fill_invalid_depth(d, {0, 5}), d);
}

TEST(FillInvalidDepth, CenterTakesSmallestNeighbor) {
  DepthImage d(3, 3);
  double v = 8.0;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x)
      if (x != 1 || y != 1) d.at(x, y) = v--;
  EXPECT_DOUBLE_EQ(fill_invalid_depth(d, {0, 3}).at(1, 1), 1.0);
}

TEST(FillInvalidDepth, SingleDistantCandidate) {
  DepthImage d(7, 1);
  d.at(4, 0) = 2.5;
  EXPECT_DOUBLE_EQ(fill_invalid_depth(d, {0, 1}).at(1, 0), 2.5);
}

TEST(FillInvalidDepth, RowsOutsideRangeUntouchedAndNoCandidateStaysInvalid) {
  DepthImage d(4, 4);
  d.at(0, 0) = 1.0;
  const DepthImage out = fill_invalid_depth(d, {1, 3});
  EXPECT_FALSE(out.valid(3, 0));  // outside range
  EXPECT_FALSE(out.valid(2, 3));  // outside range
  EXPECT_DOUBLE_EQ(out.at(0, 2), 1.0);
  EXPECT_FALSE(out.valid(2, 1));  // no line through (0, 0)
}

TEST(FillInvalidDepth, MatchesBruteForceScanner) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> dep(0.5, 9.0), u01(0, 1);
  for (int t = 0; t < 50; ++t) {
    DepthImage d(16, 16);
    const double density = 0.05 + 0.5 * u01(rng);
    for (double& v : d.data())
      if (u01(rng) < density) v = dep(rng);
    const int r0 = t % 5, r1 = 16 - (t % 3);
    EXPECT_EQ(fill_invalid_depth(d, {r0, r1}), oracle::fill_scan(d, r0, r1));
  }
}

TEST(FillInvalidDepth, IdempotentWhenFullyFilled) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> dep(0.5, 9.0), u01(0, 1);
  DepthImage d(16, 16);
  for (double& v : d.data())
    if (u01(rng) < 0.5) v = dep(rng);
  const DepthImage once = fill_invalid_depth(d, {0, 16});
  ASSERT_EQ(once.valid_count(), 256u);
  EXPECT_EQ(fill_invalid_depth(once, {0, 16}), once);
}
