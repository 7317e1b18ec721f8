#pragma once

#include <Eigen/Core>

namespace mpano {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Maps points of a source frame into a target frame: p_target = R * p_source + t.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  // Throws kInvariantViolation when `rotation` is not a proper rotation.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  RigidTransform inverse() const;
  // (a * b).apply(p) == a.apply(b.apply(p))
  friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);

  friend bool operator==(const RigidTransform& a, const RigidTransform& b) {
    return a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  struct Unchecked {};
  RigidTransform(const Mat3& r, const Vec3& t, Unchecked) : rotation_(r), translation_(t) {}

  Mat3 rotation_;
  Vec3 translation_;
};

inline constexpr double kRotationTolerance = 1e-9;

bool is_rotation(const Mat3& r, double tol = kRotationTolerance);

// Rotation of `radians` about a unit axis (right-hand rule).
Mat3 axis_angle(const Vec3& axis, double radians);

// Declared direction of a stored pose.
enum class FrameConvention {
  kCameraFromWorld,
  kVirtualFromWorld,
};

const char* to_string(FrameConvention c);

struct Pose {
  RigidTransform transform;
  FrameConvention convention = FrameConvention::kCameraFromWorld;
  friend bool operator==(const Pose&, const Pose&) = default;
};

// Pinhole model; fx, fy are focal lengths expressed in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const noexcept {
    return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && u0 >= 0.0 && u0 < width &&
           v0 >= 0.0 && v0 < height;
  }
  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

struct SphericalDirection {
  double alpha = 0.0;  // azimuth, [-pi, pi]
  double beta = 0.0;   // polar angle from +Z, [0, pi]
};

// Equirectangular raster size. Width is always twice the height.
class PanoGeometry {
 public:
  // Throws kInvalidArgument unless width == 2 * height and both are even and positive.
  PanoGeometry(int width, int height);
  static PanoGeometry from_width(int width) { return PanoGeometry(width, width / 2); }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  // First row of the nadir band (bottom two tenths of the raster).
  int nadir_band_start() const noexcept;

  friend bool operator==(const PanoGeometry&, const PanoGeometry&) = default;

 private:
  int width_;
  int height_;
};

Vec3 world_to_camera(const Vec3& p_world, const RigidTransform& camera_from_world);

// Continuous pixel coordinates, no bounds clamp. Throws kPointBehindCamera when z <= 0.
PixelCoord camera_to_pixel(const Vec3& p_camera, const CameraIntrinsics& k);

// Back-projects a pixel with camera-frame depth (Z) into the world frame.
Vec3 pixel_to_camera(double u, double v, double depth, const CameraIntrinsics& k);
Vec3 pixel_to_world(double u, double v, double depth, const CameraIntrinsics& k,
                    const RigidTransform& camera_from_world);

Vec3 world_to_virtual(const Vec3& p_world, const RigidTransform& virtual_from_world);
Vec3 virtual_to_world(const Vec3& p_virtual, const RigidTransform& virtual_from_world);

SphericalDirection direction_of(const Vec3& p_virtual);
SphericalDirection pano_angles(double u_pano, double v_pano, const PanoGeometry& g);

// Virtual-frame point -> continuous panorama coordinates. u lies in [0, U].
PixelCoord pano_forward(const Vec3& p_virtual, const PanoGeometry& g);
// Panorama coordinates plus spherical radius -> virtual-frame point.
Vec3 pano_inverse(double u_pano, double v_pano, double depth, const PanoGeometry& g);

}  // namespace mpano
