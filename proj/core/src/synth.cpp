#include "mpano/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include "mpano/calibration.hpp"
#include "mpano/error.hpp"
#include "mpano/image_io.hpp"
#include "mpano/point_cloud_io.hpp"

namespace mpano {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kCheckerSize = 0.5;  // meters

struct FaceFrame {
  Vec3 origin;
  Vec3 u;  // spans the face with |u| = side length
  Vec3 v;
};

std::array<FaceFrame, 6> face_frames(const Vec3& s) {
  return {{
      {{0, 0, 0}, {0, s.y(), 0}, {0, 0, s.z()}},
      {{s.x(), 0, 0}, {0, s.y(), 0}, {0, 0, s.z()}},
      {{0, 0, 0}, {s.x(), 0, 0}, {0, 0, s.z()}},
      {{0, s.y(), 0}, {s.x(), 0, 0}, {0, 0, s.z()}},
      {{0, 0, 0}, {s.x(), 0, 0}, {0, s.y(), 0}},
      {{0, 0, s.z()}, {s.x(), 0, 0}, {0, s.y(), 0}},
  }};
}

constexpr std::array<std::array<int, 3>, 6> kBase = {{
    {200, 168, 136},
    {136, 176, 204},
    {176, 204, 136},
    {204, 148, 180},
    {118, 108, 98},
    {228, 228, 220},
}};

// camera_from_virtual for a horizontal camera looking along azimuth `a`
// (image x to the right, image y down).
Mat3 camera_from_virtual_rotation(double a) {
  Mat3 r;
  r << std::sin(a), -std::cos(a), 0.0,  //
      0.0, 0.0, -1.0,                    //
      std::cos(a), std::sin(a), 0.0;
  return r;
}

}  // namespace

void SceneSpec::validate() const {
  if (!(room_size.minCoeff() > 0.0)) throw Error(ErrorCode::kDegenerateSpec, "room dimensions must be positive");
  if (!(density > 0.0)) throw Error(ErrorCode::kDegenerateSpec, "cloud density must be positive");
  if (camera_count < 2) throw Error(ErrorCode::kDegenerateSpec, "rig needs at least 2 cameras");
  if (!intrinsics.valid()) throw Error(ErrorCode::kDegenerateSpec, "invalid rig intrinsics");
  if (!(jitter >= 0.0 && jitter <= 1.0)) throw Error(ErrorCode::kDegenerateSpec, "jitter must lie in [0, 1]");
  if (!(rig_radius >= 0.0)) throw Error(ErrorCode::kDegenerateSpec, "rig radius must be non-negative");
  if (station_positions.empty()) throw Error(ErrorCode::kDegenerateSpec, "no station positions");
  for (const Vec3& p : station_positions) {
    const double margin = rig_radius + 1e-3;
    if ((p.array() - margin <= 0.0).any() || (p.array() + margin >= room_size.array()).any()) {
      throw Error(ErrorCode::kDegenerateSpec, "station rig must lie strictly inside the room");
    }
  }
}

RayHit ray_box_exit(const Vec3& o, const Vec3& d, const Vec3& size) {
  RayHit hit{std::numeric_limits<double>::infinity(), -1};
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) continue;
    const bool positive = d[axis] > 0.0;
    const double t = ((positive ? size[axis] : 0.0) - o[axis]) / d[axis];
    if (t < hit.t) {
      hit.t = t;
      hit.face = 2 * axis + (positive ? 1 : 0);
    }
  }
  return hit;
}

std::array<std::uint8_t, 3> surface_color(const SceneSpec& spec, int face, const Vec3& p) {
  std::array<int, 3> c = kBase[static_cast<std::size_t>(face)];
  const bool textured = spec.pattern == TexturePattern::kCheckerStripes && face != 4;
  if (textured) {
    const FaceFrame f = face_frames(spec.room_size)[static_cast<std::size_t>(face)];
    const double a = (p - f.origin).dot(f.u.normalized());
    const double b = (p - f.origin).dot(f.v.normalized());
    const long ia = static_cast<long>(std::floor(a / kCheckerSize));
    const long ib = static_cast<long>(std::floor(b / kCheckerSize));
    const int shade = ((ia + ib) % 2 == 0) ? 4 : -4;
    for (int& ch : c) ch += shade;
    // identifier: face+1 narrow stripes in a band just above mid-height
    if (face < 4 && b > 1.9 && b < 2.2) {
      const double start = 0.6;
      for (int s = 0; s <= face; ++s) {
        const double x0 = start + 0.15 * s;
        if (a >= x0 && a < x0 + 0.05) {
          for (int& ch : c) ch -= 28;
        }
      }
    }
  }
  return {static_cast<std::uint8_t>(std::clamp(c[0], 0, 255)),
          static_cast<std::uint8_t>(std::clamp(c[1], 0, 255)),
          static_cast<std::uint8_t>(std::clamp(c[2], 0, 255))};
}

SynthScene synth_scene(const SceneSpec& spec) {
  spec.validate();
  SynthScene scene;
  scene.spec = spec;

  // Cloud: one sample per lattice cell on every face, optionally jittered.
  PointCloud cloud;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cell = 1.0 / std::sqrt(spec.density);
  for (const FaceFrame& f : face_frames(spec.room_size)) {
    const int nu = std::max(1, static_cast<int>(std::lround(f.u.norm() / cell)));
    const int nv = std::max(1, static_cast<int>(std::lround(f.v.norm() / cell)));
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) {
        const double su = (i + 0.5 + spec.jitter * (unit(rng) - 0.5)) / nu;
        const double sv = (j + 0.5 + spec.jitter * (unit(rng) - 0.5)) / nv;
        cloud.points.push_back(f.origin + su * f.u + sv * f.v);
      }
  }

  const Mat3 yaw = axis_angle(Vec3::UnitZ(), spec.station_yaw_deg * kDeg);
  const CameraIntrinsics& k = spec.intrinsics;
  for (std::size_t s = 0; s < spec.station_positions.size(); ++s) {
    const Vec3& pos = spec.station_positions[s];
    StationBundle b;
    b.station_id = "station_" + std::to_string(s);
    // virtual axes are the rig axes rotated by `yaw` in the world
    const Mat3 r_v = yaw.transpose();
    b.virtual_pose = {RigidTransform(r_v, -(r_v * pos)), FrameConvention::kVirtualFromWorld};
    b.h_floor = pos.z();
    b.cloud = cloud;

    std::vector<DepthImage> truth;
    for (int c = 0; c < spec.camera_count; ++c) {
      const double az = c * spec.azimuth_spacing_deg * kDeg;
      const Mat3 r_cv = camera_from_virtual_rotation(az);
      const Vec3 center_virtual = spec.rig_radius * Vec3(std::cos(az), std::sin(az), 0.0);
      const Vec3 center_world = virtual_to_world(center_virtual, b.virtual_pose.transform);
      const Mat3 r_s = r_cv * r_v;
      const RigidTransform cam(r_s, -(r_s * center_world));

      RgbImage img(k.width, k.height, 3);
      DepthImage depth(k.width, k.height);
      for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
          const Vec3 dir_cam((u - k.u0) / k.fx, (v - k.v0) / k.fy, 1.0);
          const Vec3 dir_world = r_s.transpose() * dir_cam;
          const RayHit hit = ray_box_exit(center_world, dir_world, spec.room_size);
          const auto col = surface_color(spec, hit.face, center_world + hit.t * dir_world);
          for (int ch = 0; ch < 3; ++ch) img.at(u, v, ch) = col[ch];
          depth.at(u, v) = hit.t;  // dir_cam has unit Z, so t is the camera-frame depth
        }
      }
      b.images.push_back(std::move(img));
      b.intrinsics.push_back(k);
      b.cam_poses.push_back({cam, FrameConvention::kCameraFromWorld});
      truth.push_back(std::move(depth));
    }
    scene.stations.push_back(std::move(b));
    scene.camera_depth.push_back(std::move(truth));
  }

  const double X = spec.room_size.x();
  const double Y = spec.room_size.y();
  const double Z = spec.room_size.z();
  auto seg = [&](std::string name, Vec3 a, Vec3 b) {
    scene.segments.push_back({std::move(name), a, b, (a - b).norm()});
  };
  seg("edge x0 y0 vertical", {0, 0, 0}, {0, 0, Z});
  seg("edge x1 y0 vertical", {X, 0, 0}, {X, 0, Z});
  seg("edge x0 y1 vertical", {0, Y, 0}, {0, Y, Z});
  seg("edge x1 y1 vertical", {X, Y, 0}, {X, Y, Z});
  seg("wall corner to corner", {0, 0, Z}, {X, 0, Z});
  seg("edge x0 floor", {0, 0, 0}, {0, Y, 0});
  // checker corners sit on multiples of the checker size
  seg("marker far wall", {1.0, Y, 1.0}, {3.0, Y, 2.0});
  seg("marker wall x0", {0, 2.0, 1.0}, {0, 4.0, 2.5});
  seg("marker wall x1", {X, 1.0, 0.5}, {X, 3.5, 2.0});
  seg("marker across room", {0, 3.0, 1.5}, {X, 3.0, 1.5});
  return scene;
}

DepthImage analytic_pano_depth(const SceneSpec& spec, const StationBundle& station,
                               const PanoGeometry& g) {
  DepthImage out(g.width(), g.height());
  const RigidTransform& vp = station.virtual_pose.transform;
  const Vec3 origin = station.origin_world();
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      const Vec3 dir = vp.rotation().transpose() * pano_inverse(x, y, 1.0, g);
      out.at(x, y) = ray_box_exit(origin, dir, spec.room_size).t;
    }
  return out;
}

void save_scene(const SynthScene& scene, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "images", ec);
  fs::create_directories(dir / "truth", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  if (scene.stations.empty()) throw Error(ErrorCode::kDegenerateSpec, "scene has no stations");
  write_ply(scene.stations.front().cloud, dir / "cloud.ply");

  CalibrationFile calib;
  for (std::size_t s = 0; s < scene.stations.size(); ++s) {
    const StationBundle& b = scene.stations[s];
    StationRecord rec{b.station_id, b.virtual_pose, {}, "cloud.ply", b.h_floor};
    for (std::size_t c = 0; c < b.camera_count(); ++c) {
      const std::string stem = b.station_id + "_cam" + std::to_string(c);
      write_png(b.images[c], dir / "images" / (stem + ".png"));
      write_depth_png(scene.camera_depth[s][c], dir / "truth" / (stem + "_depth.png"));
      rec.cameras.push_back({b.intrinsics[c], b.cam_poses[c], "images/" + stem + ".png"});
    }
    calib.stations.push_back(std::move(rec));
  }
  save_calibration(calib, dir / "calibration.json");

  std::ofstream out(dir / "truth" / "segments.json");
  if (!out) throw Error(ErrorCode::kIo, "cannot write segments.json");
  out << std::setprecision(17) << "{\n  \"segments\": [\n";
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    const SegmentTruth& t = scene.segments[i];
    out << "    {\"name\": \"" << t.name << "\", \"a\": [" << t.a.x() << ", " << t.a.y() << ", "
        << t.a.z() << "], \"b\": [" << t.b.x() << ", " << t.b.y() << ", " << t.b.z()
        << "], \"length\": " << t.length << "}" << (i + 1 < scene.segments.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
}

}  // namespace mpano
