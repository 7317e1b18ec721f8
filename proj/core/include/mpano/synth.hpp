#pragma once

#include <array>
#include <filesystem>
#include <cstdint>
#include <string>
#include <vector>

#include "mpano/geometry.hpp"
#include "mpano/raster.hpp"
#include "mpano/station.hpp"

namespace mpano {

enum class TexturePattern : int {
  kCheckerStripes = 0,  // low-contrast checker plus per-wall stripes, flat floor
  kFlat = 1,            // one colour per face
};

// Axis-aligned room [0, size.x] x [0, size.y] x [0, size.z] with a horizontal
// camera rig at each station position.
struct SceneSpec {
  Vec3 room_size{4.0, 6.0, 3.0};
  int camera_count = 6;
  double azimuth_spacing_deg = 60.0;
  double rig_radius = 0.1;  // camera centres from the virtual origin, meters
  CameraIntrinsics intrinsics{360.0, 360.0, 319.5, 479.5, 640, 960};
  std::vector<Vec3> station_positions{{2.0, 1.7, 1.5}, {2.0, 4.3, 1.5}};
  double station_yaw_deg = 0.0;
  TexturePattern pattern = TexturePattern::kCheckerStripes;
  double density = 50.0;  // cloud points per square meter
  double jitter = 0.0;    // 0 = regular lattice, 1 = uniform within each lattice cell
  std::uint64_t seed = 1;

  void validate() const;
};

struct SegmentTruth {
  std::string name;
  Vec3 a;
  Vec3 b;
  double length = 0.0;
};

struct SynthScene {
  SceneSpec spec;
  std::vector<StationBundle> stations;
  // camera_depth[station][camera]: analytic camera-frame Z per pixel
  std::vector<std::vector<DepthImage>> camera_depth;
  std::vector<SegmentTruth> segments;
};

struct RayHit {
  double t = 0.0;
  int face = -1;  // 0: x=0, 1: x=X, 2: y=0, 3: y=Y, 4: floor, 5: ceiling
};

// Exit of a ray that starts inside the room. `dir` need not be normalized;
// t is in units of |dir|.
RayHit ray_box_exit(const Vec3& origin, const Vec3& dir, const Vec3& room_size);

std::array<std::uint8_t, 3> surface_color(const SceneSpec& spec, int face, const Vec3& p);

SynthScene synth_scene(const SceneSpec& spec);

// Ray-box distance from the station's virtual origin for every panorama pixel.
DepthImage analytic_pano_depth(const SceneSpec& spec, const StationBundle& station,
                               const PanoGeometry& g);

// Writes calibration.json, cloud.ply, images/, truth/segments.json and
// truth/<station>_cam<i>_depth.png under `dir`. Output is byte-identical
// for identical specs.
void save_scene(const SynthScene& scene, const std::filesystem::path& dir);

}  // namespace mpano
