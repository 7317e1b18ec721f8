#pragma once

#include <span>
#include <vector>

#include "mpano/geometry.hpp"
#include "mpano/raster.hpp"

namespace mpano {

struct PointCloud {
  std::vector<Vec3> points;  // world frame, meters
};

struct DensifyParams {
  int k_nearest = 8;               // bandwidth anchor: sigma = half the distance to this sample
  double max_radius = 30.0;        // pixels
  double sigma_color = 10.0;       // on 0..255 channel scale
  int enhancement_iters = 3;
  double enhancement_lambda = 0.2;

  void validate() const;
};

// LiDAR points -> per-pixel camera-frame Z, keeping the nearest point per pixel.
DepthImage project_sparse_depth(const PointCloud& cloud, const CameraIntrinsics& k,
                                const RigidTransform& camera_from_world);

// Guided densification of a sparse depth map. Valid input pixels are never changed.
DepthImage densify(const DepthImage& sparse, const RgbImage& guide, const DensifyParams& p = {});

struct CameraRigView {
  std::span<const CameraIntrinsics> intrinsics;
  std::span<const Pose> poses;  // camera_from_world
};

// Direct-maps every valid camera depth pixel onto the panorama, storing the
// spherical radius and averaging overlapping samples.
DepthImage build_pano_depth(std::span<const DepthImage> dense_maps, const CameraRigView& rig,
                            const Pose& virtual_pose, const PanoGeometry& g);

struct RowRange {
  int begin = 0;
  int end = 0;  // exclusive
};

// Fills invalid pixels whose rows lie in `rows` with the smallest of the first
// valid values met along the 8 compass directions. Scans read the input only.
DepthImage fill_invalid_depth(const DepthImage& pano_depth, RowRange rows);

}  // namespace mpano
