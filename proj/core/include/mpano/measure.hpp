#pragma once

#include "mpano/geometry.hpp"
#include "mpano/raster.hpp"

namespace mpano {

struct MeasuredSegment {
  PixelCoord p1;
  PixelCoord p2;
  double d1 = 0.0;  // spherical radius at p1
  double d2 = 0.0;
  Vec3 w1 = Vec3::Zero();  // world coordinates
  Vec3 w2 = Vec3::Zero();
  double length = 0.0;  // meters
};

// Panorama pixel + spherical radius -> world point.
Vec3 pano_pixel_to_world(double u, double v, double depth, const RigidTransform& virtual_from_world,
                         const PanoGeometry& g);

// Depth lookup uses the nearest raster pixel (u wraps around the seam column).
// Throws kInvalidDepth naming the pixel when either endpoint has no depth.
MeasuredSegment measure_distance(PixelCoord p1, PixelCoord p2, const DepthImage& depth_map,
                                 const RigidTransform& virtual_from_world, const PanoGeometry& g);

}  // namespace mpano
