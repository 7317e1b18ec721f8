#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mpano/raster.hpp"

namespace mpano {

// Axis-aligned rectangle in panorama pixels. Columns are taken modulo the
// panorama width by callers that need wrap-around.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  bool empty() const noexcept { return width <= 0 || height <= 0; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct OverlapRegion {
  PixelRect rect;
  Mask valid1;  // rect-sized
  Mask valid2;
  // Centroid of each image's full valid area in rect-local pixel coordinates.
  // Only consulted when a forced set is empty.
  std::optional<Eigen::Vector2d> centroid1;
  std::optional<Eigen::Vector2d> centroid2;
};

// Per-image inputs for the seam energy: HSV saturation and value in [0, 1]
// plus central-difference gradients of the value channel.
struct SeamInput {
  Raster<float> saturation;
  Raster<float> value;
  Raster<float> grad_x;
  Raster<float> grad_y;
};

SeamInput prepare_seam_input(const RgbImage& image, const Mask& valid);

struct SeamParams {
  double w = 0.5;            // weight of the V difference against the S difference
  std::optional<double> p1;  // derived from gradients when unset

  void validate() const;
};

struct PixelEnergy {
  double color = 0.0;
  double gradient = 0.0;
  double total = 0.0;
};

// Throws kInvalidPixel when (x, y) is not valid in both images.
PixelEnergy pixel_energy(int x, int y, const SeamInput& img1, const SeamInput& img2,
                         const OverlapRegion& ov, const SeamParams& params);

struct EnergyField {
  Raster<double> color;
  Raster<double> gradient;
  Raster<double> total;  // zero outside the shared area
};

EnergyField compute_energy_field(const OverlapRegion& ov, const SeamInput& img1,
                                 const SeamInput& img2, const SeamParams& params);

enum class SeamLabel : std::uint8_t { kFree = 0, kImage1 = 1, kImage2 = 2 };

// 4-connected grid graph over the overlap rectangle with undirected n-link
// weights and hard terminal assignments.
class SeamGraph {
 public:
  SeamGraph(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double p1() const noexcept { return p1_; }
  void set_p1(double p) noexcept { p1_ = p; }

  // Weight between (x, y) and (x + 1, y) / (x, y + 1).
  double& right(int x, int y) { return right_[idx(x, y)]; }
  double right(int x, int y) const { return right_[idx(x, y)]; }
  double& down(int x, int y) { return down_[idx(x, y)]; }
  double down(int x, int y) const { return down_[idx(x, y)]; }

  // Weight between two 4-adjacent pixels in either order.
  double n_link(PixelIndex a, PixelIndex b) const;

  SeamLabel forced(int x, int y) const { return forced_[idx(x, y)]; }
  void force(int x, int y, SeamLabel l) { forced_[idx(x, y)] = l; }
  std::size_t forced_count(SeamLabel l) const;

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  double p1_ = 0.0;
  std::vector<double> right_;
  std::vector<double> down_;
  std::vector<SeamLabel> forced_;
};

enum class DegeneratePolicy {
  kThrow,        // kDegenerateOverlap when either forced set is empty
  kSeedBorders,  // force the rect border column nearest each image's centroid
};

SeamGraph build_seam_graph(const OverlapRegion& ov, const SeamInput& img1, const SeamInput& img2,
                           const SeamParams& params,
                           DegeneratePolicy policy = DegeneratePolicy::kThrow);

struct SeamLabeling {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;  // 1 = image 1, 2 = image 2, row-major
  double energy = 0.0;

  std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Sum of n-link weights over 4-adjacent pairs whose labels differ.
double labeling_energy(const SeamGraph& graph, const std::vector<std::uint8_t>& labels);

// Globally minimal labeling subject to the hard assignments.
SeamLabeling min_cut(const SeamGraph& graph);

using SeamPair = std::pair<PixelIndex, PixelIndex>;

// 4-adjacent pairs with differing labels, row-major by first pixel; for each
// pixel the right-hand pair precedes the lower pair.
std::vector<SeamPair> extract_seam(const SeamLabeling& labeling);

}  // namespace mpano
