#include "mpano/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "mpano/error.hpp"

namespace mpano {

namespace {
constexpr double kPi = std::numbers::pi;
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r - Mat3::Identity();
  if (gram.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 axis_angle(const Vec3& axis, double radians) {
  return Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation)) {
    throw Error(ErrorCode::kInvariantViolation, "matrix is not a proper rotation");
  }
  if (!translation.allFinite()) {
    throw Error(ErrorCode::kInvariantViolation, "translation is not finite");
  }
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_), Unchecked{});
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_,
                        RigidTransform::Unchecked{});
}

const char* to_string(FrameConvention c) {
  switch (c) {
    case FrameConvention::kCameraFromWorld: return "camera_from_world";
    case FrameConvention::kVirtualFromWorld: return "virtual_from_world";
  }
  return "unknown";
}

PanoGeometry::PanoGeometry(int width, int height) : width_(width), height_(height) {
  if (height <= 0 || width != 2 * height || height % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "panorama must be W x H with W = 2H, both even and positive (got " +
                    std::to_string(width) + "x" + std::to_string(height) + ")");
  }
}

int PanoGeometry::nadir_band_start() const noexcept {
  // rows v >= 0.8 * V; exact in integers because V is even
  return static_cast<int>((4LL * height_ + 4) / 5);
}

Vec3 world_to_camera(const Vec3& p_world, const RigidTransform& camera_from_world) {
  return camera_from_world.apply(p_world);
}

PixelCoord camera_to_pixel(const Vec3& p_camera, const CameraIntrinsics& k) {
  if (!(p_camera.z() > 0.0)) {
    throw Error(ErrorCode::kPointBehindCamera, "camera-frame Z must be positive");
  }
  return {k.fx * p_camera.x() / p_camera.z() + k.u0, k.fy * p_camera.y() / p_camera.z() + k.v0};
}

Vec3 pixel_to_camera(double u, double v, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive");
  return {(u - k.u0) * depth / k.fx, (v - k.v0) * depth / k.fy, depth};
}

Vec3 pixel_to_world(double u, double v, double depth, const CameraIntrinsics& k,
                    const RigidTransform& camera_from_world) {
  const Vec3 pc = pixel_to_camera(u, v, depth, k);
  return camera_from_world.rotation().transpose() * (pc - camera_from_world.translation());
}

Vec3 world_to_virtual(const Vec3& p_world, const RigidTransform& virtual_from_world) {
  return virtual_from_world.apply(p_world);
}

Vec3 virtual_to_world(const Vec3& p_virtual, const RigidTransform& virtual_from_world) {
  return virtual_from_world.rotation().transpose() *
         (p_virtual - virtual_from_world.translation());
}

SphericalDirection direction_of(const Vec3& p) {
  // atan2(0, 0) == 0, which pins the azimuth at the poles
  return {std::atan2(p.y(), p.x()), std::atan2(std::hypot(p.x(), p.y()), p.z())};
}

SphericalDirection pano_angles(double u_pano, double v_pano, const PanoGeometry& g) {
  return {kPi - u_pano * 2.0 * kPi / g.width(), kPi * v_pano / g.height()};
}

PixelCoord pano_forward(const Vec3& p_virtual, const PanoGeometry& g) {
  if (p_virtual.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cannot map the projection center");
  }
  const SphericalDirection d = direction_of(p_virtual);
  return {g.width() * (kPi - d.alpha) / (2.0 * kPi), g.height() * d.beta / kPi};
}

Vec3 pano_inverse(double u_pano, double v_pano, double depth, const PanoGeometry& g) {
  if (!(depth > 0.0)) throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive");
  if (!(u_pano >= 0.0 && u_pano < g.width() && v_pano >= 0.0 && v_pano <= g.height())) {
    throw Error(ErrorCode::kOutOfRange, "panorama pixel (" + std::to_string(u_pano) + ", " +
                                            std::to_string(v_pano) + ") outside raster");
  }
  const SphericalDirection d = pano_angles(u_pano, v_pano, g);
  const double s = std::sin(d.beta);
  return {depth * s * std::cos(d.alpha), depth * s * std::sin(d.alpha), depth * std::cos(d.beta)};
}

}  // namespace mpano
