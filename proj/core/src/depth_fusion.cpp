#include "mpano/depth_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpano/error.hpp"

namespace mpano {

void DensifyParams::validate() const {
  if (k_nearest < 1 || !(max_radius >= 1.0) || !(sigma_color > 0.0) || enhancement_iters < 0 ||
      !(enhancement_lambda > 0.0 && enhancement_lambda < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "densify parameters out of range");
  }
}

DepthImage project_sparse_depth(const PointCloud& cloud, const CameraIntrinsics& k,
                                const RigidTransform& camera_from_world) {
  if (cloud.points.empty()) throw Error(ErrorCode::kEmptyCloud, "no points to project");
  DepthImage depth(k.width, k.height);
  for (const Vec3& p : cloud.points) {
    const Vec3 pc = world_to_camera(p, camera_from_world);
    if (!(pc.z() > 0.0) || !pc.allFinite()) continue;
    const PixelCoord px = camera_to_pixel(pc, k);
    const double ur = std::round(px.u);
    const double vr = std::round(px.v);
    if (ur < 0.0 || vr < 0.0 || ur >= k.width || vr >= k.height) continue;
    double& slot = depth.at(static_cast<int>(ur), static_cast<int>(vr));
    if (slot == DepthImage::kInvalid || pc.z() < slot) slot = pc.z();
  }
  return depth;
}

namespace {

struct Sample {
  int x;
  int y;
  double depth;
};

double color_dist2(const RgbImage& img, int x0, int y0, int x1, int y1) {
  double s = 0.0;
  for (int c = 0; c < img.channels(); ++c) {
    const double d = double(img.at(x0, y0, c)) - double(img.at(x1, y1, c));
    s += d * d;
  }
  return s;
}

// Uniform bucket grid over sample positions; cell size equals the search radius.
class SampleGrid {
 public:
  SampleGrid(std::vector<Sample> samples, int width, int height, int cell)
      : cell_(cell), cols_((width + cell - 1) / cell), rows_((height + cell - 1) / cell) {
    starts_.assign(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
    for (const Sample& s : samples) ++starts_[bucket(s.x, s.y) + 1];
    for (std::size_t i = 1; i < starts_.size(); ++i) starts_[i] += starts_[i - 1];
    samples_.resize(samples.size());
    std::vector<std::size_t> fill(starts_.begin(), starts_.end() - 1);
    for (const Sample& s : samples) samples_[fill[bucket(s.x, s.y)]++] = s;
  }

  template <typename Fn>
  void for_each_near(int x, int y, Fn&& fn) const {
    const int cx = x / cell_;
    const int cy = y / cell_;
    for (int by = std::max(0, cy - 1); by <= std::min(rows_ - 1, cy + 1); ++by) {
      for (int bx = std::max(0, cx - 1); bx <= std::min(cols_ - 1, cx + 1); ++bx) {
        const std::size_t b = static_cast<std::size_t>(by) * cols_ + bx;
        for (std::size_t i = starts_[b]; i < starts_[b + 1]; ++i) fn(samples_[i]);
      }
    }
  }

 private:
  std::size_t bucket(int x, int y) const {
    return static_cast<std::size_t>(y / cell_) * cols_ + x / cell_;
  }

  int cell_;
  int cols_;
  int rows_;
  std::vector<std::size_t> starts_;
  std::vector<Sample> samples_;
};

}  // namespace

DepthImage densify(const DepthImage& sparse, const RgbImage& guide, const DensifyParams& p) {
  p.validate();
  if (sparse.width() != guide.width() || sparse.height() != guide.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "sparse depth and guide image differ in size");
  }
  const int w = sparse.width();
  const int h = sparse.height();

  std::vector<Sample> samples;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (sparse.valid(x, y)) samples.push_back({x, y, sparse.at(x, y)});
  if (samples.empty()) throw Error(ErrorCode::kNoValidSamples, "sparse depth has no valid pixel");

  const int cell = static_cast<int>(std::ceil(p.max_radius));
  const SampleGrid grid(samples, w, h, cell);
  const double r2_max = p.max_radius * p.max_radius;
  const double inv_2sc2 = 1.0 / (2.0 * p.sigma_color * p.sigma_color);

  DepthImage out = sparse;
  std::vector<double> dist2;
  struct Term {
    double log_w;
    double depth;
  };
  std::vector<Term> terms;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (sparse.valid(x, y)) continue;
      dist2.clear();
      grid.for_each_near(x, y, [&](const Sample& s) {
        const double dx = s.x - x;
        const double dy = s.y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= r2_max) dist2.push_back(d2);
      });
      if (dist2.empty()) continue;

      // fewer than k samples in range: anchor on the farthest one available
      const std::size_t kth = std::min<std::size_t>(p.k_nearest, dist2.size()) - 1;
      std::nth_element(dist2.begin(), dist2.begin() + kth, dist2.end());
      const double sigma_s = 0.5 * std::sqrt(dist2[kth]);
      const double inv_2ss2 = 1.0 / (2.0 * sigma_s * sigma_s);

      terms.clear();
      double max_log = -std::numeric_limits<double>::infinity();
      grid.for_each_near(x, y, [&](const Sample& s) {
        const double dx = s.x - x;
        const double dy = s.y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > r2_max) return;
        const double lw = -d2 * inv_2ss2 - color_dist2(guide, x, y, s.x, s.y) * inv_2sc2;
        terms.push_back({lw, s.depth});
        max_log = std::max(max_log, lw);
      });
      // normalizing by the largest log-weight leaves the ratio unchanged and avoids underflow
      double num = 0.0;
      double den = 0.0;
      for (const Term& t : terms) {
        const double wgt = std::exp(t.log_w - max_log);
        num += wgt * t.depth;
        den += wgt;
      }
      out.at(x, y) = num / den;
    }
  }

  if (p.enhancement_iters == 0) return out;

  // Edge-aware diffusion over the filled pixels.
  std::vector<double> edge_w;  // per pixel, 4 neighbor weights (L, R, U, D)
  edge_w.assign(static_cast<std::size_t>(w) * h * 4, 0.0);
  constexpr int kDx[4] = {-1, 1, 0, 0};
  constexpr int kDy[4] = {0, 0, -1, 1};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int n = 0; n < 4; ++n) {
        const int nx = x + kDx[n];
        const int ny = y + kDy[n];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        edge_w[(static_cast<std::size_t>(y) * w + x) * 4 + n] =
            std::exp(-color_dist2(guide, x, y, nx, ny) * inv_2sc2);
      }

  DepthImage next = out;
  for (int it = 0; it < p.enhancement_iters; ++it) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (sparse.valid(x, y) || !out.valid(x, y)) continue;
        const double dq = out.at(x, y);
        double delta = 0.0;
        for (int n = 0; n < 4; ++n) {
          const int nx = x + kDx[n];
          const int ny = y + kDy[n];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !out.valid(nx, ny)) continue;
          delta += edge_w[(static_cast<std::size_t>(y) * w + x) * 4 + n] * (out.at(nx, ny) - dq);
        }
        next.at(x, y) = dq + p.enhancement_lambda * delta / 4.0;
      }
    }
    out = next;
  }
  return out;
}

DepthImage build_pano_depth(std::span<const DepthImage> dense_maps, const CameraRigView& rig,
                            const Pose& virtual_pose, const PanoGeometry& g) {
  if (virtual_pose.convention != FrameConvention::kVirtualFromWorld) {
    throw Error(ErrorCode::kFrameConvention, "station pose must be declared virtual_from_world");
  }
  if (dense_maps.size() != rig.intrinsics.size() || dense_maps.size() != rig.poses.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one depth map, intrinsics and pose per camera");
  }
  for (const Pose& pose : rig.poses) {
    if (pose.convention != FrameConvention::kCameraFromWorld) {
      throw Error(ErrorCode::kFrameConvention, "camera poses must be declared camera_from_world");
    }
  }

  const int pw = g.width();
  const int ph = g.height();
  std::vector<double> sum(static_cast<std::size_t>(pw) * ph, 0.0);
  std::vector<std::uint32_t> count(sum.size(), 0);

  for (std::size_t cam = 0; cam < dense_maps.size(); ++cam) {
    const DepthImage& dm = dense_maps[cam];
    const CameraIntrinsics& k = rig.intrinsics[cam];
    if (dm.width() != k.width || dm.height() != k.height) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "depth map " + std::to_string(cam) + " does not match its intrinsics");
    }
    const RigidTransform virtual_from_camera =
        virtual_pose.transform * rig.poses[cam].transform.inverse();
    for (int y = 0; y < dm.height(); ++y) {
      for (int x = 0; x < dm.width(); ++x) {
        if (!dm.valid(x, y)) continue;
        const Vec3 pv = virtual_from_camera.apply(pixel_to_camera(x, y, dm.at(x, y), k));
        const double radius = pv.norm();
        if (!(radius > 0.0)) continue;
        const PixelCoord pc = pano_forward(pv, g);
        int u = static_cast<int>(std::lround(pc.u));
        if (u >= pw) u -= pw;
        const int v = std::min(static_cast<int>(std::lround(pc.v)), ph - 1);
        const std::size_t i = static_cast<std::size_t>(v) * pw + u;
        sum[i] += radius;
        ++count[i];
      }
    }
  }

  DepthImage pano(pw, ph);
  auto out = pano.data();
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (count[i] > 0) out[i] = sum[i] / count[i];
  }
  return pano;
}

DepthImage fill_invalid_depth(const DepthImage& pano_depth, RowRange rows) {
  const int w = pano_depth.width();
  const int h = pano_depth.height();
  const int r0 = std::clamp(rows.begin, 0, h);
  const int r1 = std::clamp(rows.end, r0, h);
  DepthImage out = pano_depth;
  if (r0 == r1) return out;

  constexpr double kNone = std::numeric_limits<double>::infinity();
  std::vector<double> best(static_cast<std::size_t>(w) * h, kNone);
  std::vector<double> nearest(best.size(), 0.0);
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  // nearest(x, y) = first valid value strictly beyond (x, y) along (dx, dy),
  // computed with one sweep that visits (x + dx, y + dy) before (x, y).
  static constexpr int kDirs[8][2] = {{0, -1}, {0, 1},  {-1, 0}, {1, 0},
                                      {1, -1}, {-1, -1}, {1, 1},  {-1, 1}};
  for (const auto& dir : kDirs) {
    const int dx = dir[0];
    const int dy = dir[1];
    for (int step_y = 0; step_y < h; ++step_y) {
      const int y = dy > 0 ? h - 1 - step_y : step_y;
      for (int step_x = 0; step_x < w; ++step_x) {
        const int x = dx > 0 ? w - 1 - step_x : step_x;
        const int nx = x + dx;
        const int ny = y + dy;
        double v = 0.0;
        if (nx >= 0 && ny >= 0 && nx < w && ny < h) {
          v = pano_depth.valid(nx, ny) ? pano_depth.at(nx, ny) : nearest[idx(nx, ny)];
        }
        nearest[idx(x, y)] = v;
      }
    }
    for (int y = r0; y < r1; ++y)
      for (int x = 0; x < w; ++x) {
        const double v = nearest[idx(x, y)];
        if (v > 0.0) best[idx(x, y)] = std::min(best[idx(x, y)], v);
      }
  }

  for (int y = r0; y < r1; ++y)
    for (int x = 0; x < w; ++x)
      if (!pano_depth.valid(x, y) && best[idx(x, y)] != kNone) out.at(x, y) = best[idx(x, y)];
  return out;
}

}  // namespace mpano
