#include "mpano/measure.hpp"

#include <cmath>
#include <sstream>

#include "mpano/error.hpp"

namespace mpano {

Vec3 pano_pixel_to_world(double u, double v, double depth, const RigidTransform& virtual_from_world,
                         const PanoGeometry& g) {
  return virtual_to_world(pano_inverse(u, v, depth, g), virtual_from_world);
}

namespace {

struct Endpoint {
  Vec3 virtual_point;
  double depth;
};

Endpoint resolve(PixelCoord p, const DepthImage& depth_map, const PanoGeometry& g) {
  if (!(p.u >= 0.0 && p.u < g.width() && p.v >= 0.0 && p.v <= g.height())) {
    std::ostringstream os;
    os << "pixel (" << p.u << ", " << p.v << ") lies outside the panorama";
    throw Error(ErrorCode::kOutOfRange, os.str());
  }
  int x = static_cast<int>(std::lround(p.u));
  if (x >= g.width()) x -= g.width();
  const int y = std::min(static_cast<int>(std::lround(p.v)), g.height() - 1);
  if (!depth_map.contains(x, y) || !depth_map.valid(x, y)) {
    std::ostringstream os;
    os << "no depth at pixel (" << p.u << ", " << p.v << ")";
    throw Error(ErrorCode::kInvalidDepth, os.str());
  }
  const double d = depth_map.at(x, y);
  return {pano_inverse(p.u, p.v, d, g), d};
}

}  // namespace

MeasuredSegment measure_distance(PixelCoord p1, PixelCoord p2, const DepthImage& depth_map,
                                 const RigidTransform& virtual_from_world, const PanoGeometry& g) {
  if (depth_map.width() != g.width() || depth_map.height() != g.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "depth map does not match the panorama geometry");
  }
  const Endpoint e1 = resolve(p1, depth_map, g);
  const Endpoint e2 = resolve(p2, depth_map, g);

  MeasuredSegment s;
  s.p1 = p1;
  s.p2 = p2;
  s.d1 = e1.depth;
  s.d2 = e2.depth;
  s.w1 = virtual_to_world(e1.virtual_point, virtual_from_world);
  s.w2 = virtual_to_world(e2.virtual_point, virtual_from_world);
  // rigid transforms preserve distance, so the virtual frame gives the same length
  s.length = (e1.virtual_point - e2.virtual_point).norm();
  return s;
}

}  // namespace mpano
