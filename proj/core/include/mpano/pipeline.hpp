#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mpano/blend.hpp"
#include "mpano/depth_fusion.hpp"
#include "mpano/geometry.hpp"
#include "mpano/seam.hpp"
#include "mpano/station.hpp"

namespace mpano {

inline constexpr std::int16_t kNoCoverage = -1;
// Nadir pixel whose colour came from a neighboring station.
inline constexpr std::int16_t kNeighborCoverage = -2;

// One pairwise seam search made while folding a camera into the composite.
struct SeamRecord {
  int camera = 0;  // index of the camera being added
  OverlapRegion overlap;  // rect columns wrap modulo the panorama width
  SeamLabeling labeling;
  std::vector<SeamPair> pairs;  // rect-local
};

struct PanoComposite {
  PanoGeometry geometry;
  RgbImage rgb;
  DepthImage depth;
  Raster<std::int16_t> coverage;  // camera index, kNoCoverage or kNeighborCoverage
  std::vector<SeamRecord> seams;

  explicit PanoComposite(const PanoGeometry& g);
  bool covered(int x, int y) const { return coverage.at(x, y) != kNoCoverage; }
};

struct CameraRender {
  RgbImage rgb;
  Mask valid;
};

struct StitchOptions {
  SeamParams seam;
  int blend_levels = 0;  // 0 picks default_blend_levels per overlap rect
  DensifyParams densify;
};

// Bilinear lookup; (u, v) must lie in [0, w-1] x [0, h-1].
void sample_bilinear(const RgbImage& img, double u, double v, std::uint8_t out[3]);

// Inverse-maps the camera image onto the panorama using `pano_depth` as the
// spherical radius. Pixels without depth or outside the frustum stay unset.
CameraRender render_camera_to_pano(const StationBundle& bundle, std::size_t cam_index,
                                   const DepthImage& pano_depth, const PanoGeometry& g);

// Optical-axis azimuths in the virtual frame, ascending; ties keep index order.
std::vector<std::size_t> stitch_order(const StationBundle& bundle);

// Per-camera densified depth from the station cloud.
std::vector<DepthImage> camera_depth_maps(const StationBundle& bundle, const DensifyParams& p);

// Direct-mapped panoramic depth with holes above the nadir band filled.
DepthImage station_pano_depth(const StationBundle& bundle, const PanoGeometry& g,
                              const DensifyParams& p);

PanoComposite stitch_station(const StationBundle& bundle, const PanoGeometry& g,
                             const StitchOptions& options = {});

// Other stations ordered nearest-first by virtual-origin distance, at most `max_count`.
std::vector<const StationBundle*> neighbor_stations(std::span<const StationBundle> stations,
                                                    std::size_t current, std::size_t max_count = 4);

// Colours the nadir band from neighboring stations assuming a flat floor
// h_floor below the virtual origin. Throws kNoNeighbors for an empty list.
PanoComposite fill_black_hole(const PanoComposite& composite, const StationBundle& current,
                              std::span<const StationBundle* const> neighbors,
                              const PanoGeometry& g);

}  // namespace mpano
