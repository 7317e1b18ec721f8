#pragma once

#include <string>
#include <vector>

#include "mpano/depth_fusion.hpp"
#include "mpano/geometry.hpp"
#include "mpano/raster.hpp"

namespace mpano {

// One capture station: undistorted camera images with their calibration,
// the station's virtual frame, and the LiDAR cloud, all in one world frame.
struct StationBundle {
  std::string station_id;
  std::vector<RgbImage> images;
  std::vector<CameraIntrinsics> intrinsics;
  std::vector<Pose> cam_poses;  // camera_from_world
  Pose virtual_pose{RigidTransform{}, FrameConvention::kVirtualFromWorld};
  PointCloud cloud;
  double h_floor = 0.0;  // sensor height above the floor, meters

  std::size_t camera_count() const noexcept { return intrinsics.size(); }
  CameraRigView rig() const { return {intrinsics, cam_poses}; }
  // Virtual-frame origin expressed in world coordinates.
  Vec3 origin_world() const;

  // Throws kInvariantViolation describing the first broken invariant.
  void validate(std::size_t min_cameras = 2) const;
};

}  // namespace mpano
