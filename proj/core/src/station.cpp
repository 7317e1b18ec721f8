#include "mpano/station.hpp"

#include "mpano/error.hpp"

namespace mpano {

Vec3 StationBundle::origin_world() const {
  return virtual_to_world(Vec3::Zero(), virtual_pose.transform);
}

void StationBundle::validate(std::size_t min_cameras) const {
  const std::string who = "station '" + station_id + "'";
  if (camera_count() < min_cameras) {
    throw Error(ErrorCode::kInvariantViolation,
                who + " needs at least " + std::to_string(min_cameras) + " cameras");
  }
  if (images.size() != intrinsics.size() || cam_poses.size() != intrinsics.size()) {
    throw Error(ErrorCode::kInvariantViolation, who + ": images, intrinsics and poses differ in count");
  }
  if (!(h_floor > 0.0)) throw Error(ErrorCode::kInvariantViolation, who + ": h_floor must be positive");
  if (virtual_pose.convention != FrameConvention::kVirtualFromWorld) {
    throw Error(ErrorCode::kFrameConvention, who + ": station pose must be virtual_from_world");
  }
  for (std::size_t i = 0; i < camera_count(); ++i) {
    const std::string cam = who + " camera " + std::to_string(i);
    const CameraIntrinsics& k = intrinsics[i];
    if (!k.valid()) throw Error(ErrorCode::kInvariantViolation, cam + ": invalid intrinsics");
    if (images[i].width() != k.width || images[i].height() != k.height || images[i].channels() != 3) {
      throw Error(ErrorCode::kInvariantViolation, cam + ": image size does not match intrinsics");
    }
    if (cam_poses[i].convention != FrameConvention::kCameraFromWorld) {
      throw Error(ErrorCode::kFrameConvention, cam + ": pose must be camera_from_world");
    }
  }
}

}  // namespace mpano
