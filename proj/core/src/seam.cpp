#include "mpano/seam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpano/error.hpp"
#include "mpano/maxflow.hpp"

namespace mpano {

namespace {

constexpr double kP1Margin = 1e-6;

bool shared(const OverlapRegion& ov, int x, int y) {
  return ov.valid1.at(x, y) != 0 && ov.valid2.at(x, y) != 0;
}

void check_shapes(const OverlapRegion& ov, const SeamInput& a, const SeamInput& b) {
  const int w = ov.rect.width;
  const int h = ov.rect.height;
  auto ok = [&](const auto& r) { return r.width() == w && r.height() == h; };
  if (!ok(ov.valid1) || !ok(ov.valid2) || !ok(a.value) || !ok(b.value) || !ok(a.saturation) ||
      !ok(b.saturation) || !ok(a.grad_x) || !ok(b.grad_x) || !ok(a.grad_y) || !ok(b.grad_y)) {
    throw Error(ErrorCode::kDimensionMismatch, "overlap masks and seam inputs must match the rect");
  }
}

}  // namespace

SeamInput prepare_seam_input(const RgbImage& image, const Mask& valid) {
  if (!image.same_size(valid) || image.channels() != 3) {
    throw Error(ErrorCode::kDimensionMismatch, "seam input needs an RGB image and a same-size mask");
  }
  const int w = image.width();
  const int h = image.height();
  SeamInput in{Raster<float>(w, h), Raster<float>(w, h), Raster<float>(w, h),
               Raster<float>(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int r = image.at(x, y, 0);
      const int g = image.at(x, y, 1);
      const int b = image.at(x, y, 2);
      const int mx = std::max({r, g, b});
      const int mn = std::min({r, g, b});
      in.value.at(x, y) = static_cast<float>(mx / 255.0);
      in.saturation.at(x, y) = mx == 0 ? 0.0f : static_cast<float>(double(mx - mn) / mx);
    }
  }
  // Central differences; a missing or invalid neighbor is replaced by the center sample.
  auto v_at = [&](int x, int y, int cx, int cy) {
    if (x < 0 || y < 0 || x >= w || y >= h || valid.at(x, y) == 0) return in.value.at(cx, cy);
    return in.value.at(x, y);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (valid.at(x, y) == 0) continue;
      in.grad_x.at(x, y) = 0.5f * (v_at(x + 1, y, x, y) - v_at(x - 1, y, x, y));
      in.grad_y.at(x, y) = 0.5f * (v_at(x, y + 1, x, y) - v_at(x, y - 1, x, y));
    }
  }
  return in;
}

void SeamParams::validate() const {
  if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "seam weight w must lie in [0, 1]");
  if (p1 && !(*p1 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "p1 must be positive");
}

PixelEnergy pixel_energy(int x, int y, const SeamInput& img1, const SeamInput& img2,
                         const OverlapRegion& ov, const SeamParams& params) {
  if (!ov.valid1.contains(x, y) || !shared(ov, x, y)) {
    throw Error(ErrorCode::kInvalidPixel, "pixel (" + std::to_string(x) + ", " +
                                              std::to_string(y) + ") is not valid in both images");
  }
  const double w = params.w;
  const double dv = std::abs(double(img1.value.at(x, y)) - img2.value.at(x, y));
  const double ds = std::abs(double(img1.saturation.at(x, y)) - img2.saturation.at(x, y));
  const double g1x = img1.grad_x.at(x, y);
  const double g2x = img2.grad_x.at(x, y);
  const double g1y = img1.grad_y.at(x, y);
  const double g2y = img2.grad_y.at(x, y);

  PixelEnergy e;
  e.color = w * dv + (1.0 - w) * ds;
  e.gradient = 0.25 * (std::abs(g1x) + std::abs(g2x) + std::abs(g1y) + std::abs(g2y)) +
               std::abs(g1x - g2x) + std::abs(g1y - g2y);
  e.total = e.color + e.gradient;
  return e;
}

EnergyField compute_energy_field(const OverlapRegion& ov, const SeamInput& img1,
                                 const SeamInput& img2, const SeamParams& params) {
  params.validate();
  check_shapes(ov, img1, img2);
  const int w = ov.rect.width;
  const int h = ov.rect.height;
  EnergyField f{Raster<double>(w, h), Raster<double>(w, h), Raster<double>(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!shared(ov, x, y)) continue;
      const PixelEnergy e = pixel_energy(x, y, img1, img2, ov, params);
      f.color.at(x, y) = e.color;
      f.gradient.at(x, y) = e.gradient;
      f.total.at(x, y) = e.total;
    }
  }
  return f;
}

SeamGraph::SeamGraph(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kDegenerateOverlap, "seam graph needs a non-empty rectangle");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  right_.assign(n, 0.0);
  down_.assign(n, 0.0);
  forced_.assign(n, SeamLabel::kFree);
}

double SeamGraph::n_link(PixelIndex a, PixelIndex b) const {
  if (a.y == b.y && std::abs(a.x - b.x) == 1) return right(std::min(a.x, b.x), a.y);
  if (a.x == b.x && std::abs(a.y - b.y) == 1) return down(a.x, std::min(a.y, b.y));
  throw Error(ErrorCode::kInvalidArgument, "pixels are not 4-adjacent");
}

std::size_t SeamGraph::forced_count(SeamLabel l) const {
  return static_cast<std::size_t>(std::count(forced_.begin(), forced_.end(), l));
}

namespace {

// Forces one border line of the rect to `label`, skipping pixels already held
// by the other label. Columns are preferred; single-column rects use rows.
void seed_border(SeamGraph& g, bool far_side, SeamLabel label) {
  const bool use_columns = g.width() > 1 || g.height() == 1;
  if (use_columns) {
    const int x = far_side ? g.width() - 1 : 0;
    for (int y = 0; y < g.height(); ++y)
      if (g.forced(x, y) == SeamLabel::kFree) g.force(x, y, label);
  } else {
    const int y = far_side ? g.height() - 1 : 0;
    for (int x = 0; x < g.width(); ++x)
      if (g.forced(x, y) == SeamLabel::kFree) g.force(x, y, label);
  }
}

Eigen::Vector2d mask_centroid(const Mask& m) {
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  double n = 0.0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y) != 0) {
        s += Eigen::Vector2d(x, y);
        n += 1.0;
      }
  return n > 0.0 ? Eigen::Vector2d(s / n) : Eigen::Vector2d(0.5 * (m.width() - 1), 0.5 * (m.height() - 1));
}

}  // namespace

SeamGraph build_seam_graph(const OverlapRegion& ov, const SeamInput& img1, const SeamInput& img2,
                           const SeamParams& params, DegeneratePolicy policy) {
  if (ov.rect.empty()) throw Error(ErrorCode::kDegenerateOverlap, "overlap rectangle is empty");
  const EnergyField field = compute_energy_field(ov, img1, img2, params);
  const int w = ov.rect.width;
  const int h = ov.rect.height;

  double p1 = 0.0;
  if (params.p1) {
    p1 = *params.p1;
  } else {
    double max_grad = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (ov.valid1.at(x, y) != 0)
          max_grad = std::max(max_grad, std::hypot(double(img1.grad_x.at(x, y)), double(img1.grad_y.at(x, y))));
        if (ov.valid2.at(x, y) != 0)
          max_grad = std::max(max_grad, std::hypot(double(img2.grad_x.at(x, y)), double(img2.grad_y.at(x, y))));
      }
    }
    double max_c = 0.0;
    for (double c : field.total.data()) max_c = std::max(max_c, c);
    p1 = std::max(2.0 * max_grad, 2.0 * max_c + kP1Margin);
  }

  SeamGraph g(w, h);
  g.set_p1(p1);
  auto link = [&](int xa, int ya, int xb, int yb) {
    return shared(ov, xa, ya) && shared(ov, xb, yb) ? field.total.at(xa, ya) + field.total.at(xb, yb)
                                                    : p1;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) g.right(x, y) = link(x, y, x + 1, y);
      if (y + 1 < h) g.down(x, y) = link(x, y, x, y + 1);
      const bool in1 = ov.valid1.at(x, y) != 0;
      const bool in2 = ov.valid2.at(x, y) != 0;
      if (in1 && !in2) g.force(x, y, SeamLabel::kImage1);
      if (in2 && !in1) g.force(x, y, SeamLabel::kImage2);
    }
  }

  const bool none1 = g.forced_count(SeamLabel::kImage1) == 0;
  const bool none2 = g.forced_count(SeamLabel::kImage2) == 0;
  if (!none1 && !none2) return g;
  if (policy == DegeneratePolicy::kThrow) {
    throw Error(ErrorCode::kDegenerateOverlap, "overlap has no pixel exclusive to image " +
                                                   std::string(none1 ? "1" : "2"));
  }
  if (w == 1 && h == 1) {
    throw Error(ErrorCode::kDegenerateOverlap, "single-pixel overlap cannot be seeded");
  }

  const Eigen::Vector2d c1 = ov.centroid1.value_or(mask_centroid(ov.valid1));
  const Eigen::Vector2d c2 = ov.centroid2.value_or(mask_centroid(ov.valid2));
  const bool columns = w > 1;
  const double a1 = columns ? c1.x() : c1.y();
  const double a2 = columns ? c2.x() : c2.y();
  // image 1 takes the near border unless its centroid lies past image 2's
  const bool image1_far = a1 > a2;
  if (none1) seed_border(g, image1_far, SeamLabel::kImage1);
  if (none2) seed_border(g, !image1_far, SeamLabel::kImage2);
  if (g.forced_count(SeamLabel::kImage1) == 0 || g.forced_count(SeamLabel::kImage2) == 0) {
    throw Error(ErrorCode::kDegenerateOverlap, "fallback seeding left a terminal without pixels");
  }
  return g;
}

double labeling_energy(const SeamGraph& g, const std::vector<std::uint8_t>& labels) {
  const int w = g.width();
  const int h = g.height();
  if (labels.size() != static_cast<std::size_t>(w) * h) {
    throw Error(ErrorCode::kDimensionMismatch, "labeling size does not match graph");
  }
  double e = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t l = labels[static_cast<std::size_t>(y) * w + x];
      if (x + 1 < w && l != labels[static_cast<std::size_t>(y) * w + x + 1]) e += g.right(x, y);
      if (y + 1 < h && l != labels[static_cast<std::size_t>(y + 1) * w + x]) e += g.down(x, y);
    }
  }
  return e;
}

SeamLabeling min_cut(const SeamGraph& g) {
  if (g.forced_count(SeamLabel::kImage1) == 0 || g.forced_count(SeamLabel::kImage2) == 0) {
    throw Error(ErrorCode::kDegenerateOverlap, "min-cut needs pixels forced to both images");
  }
  const int w = g.width();
  const int h = g.height();
  const int n = w * h;

  // Exceeds any cut made of n-links alone, so hard assignments are never cut.
  double hard = 1.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) hard += g.right(x, y) + g.down(x, y);

  MaxFlowGraph flow(n, static_cast<std::size_t>(2 * n));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      if (x + 1 < w) flow.add_edge(i, i + 1, g.right(x, y), g.right(x, y));
      if (y + 1 < h) flow.add_edge(i, i + w, g.down(x, y), g.down(x, y));
      switch (g.forced(x, y)) {
        case SeamLabel::kImage1: flow.add_terminal_weights(i, hard, 0.0); break;
        case SeamLabel::kImage2: flow.add_terminal_weights(i, 0.0, hard); break;
        case SeamLabel::kFree: break;
      }
    }
  }
  flow.solve();

  SeamLabeling out;
  out.width = w;
  out.height = h;
  out.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.labels[i] = flow.in_source_set(i) ? 1 : 2;
  out.energy = labeling_energy(g, out.labels);
  return out;
}

std::vector<SeamPair> extract_seam(const SeamLabeling& lab) {
  std::vector<SeamPair> pairs;
  for (int y = 0; y < lab.height; ++y) {
    for (int x = 0; x < lab.width; ++x) {
      if (x + 1 < lab.width && lab.at(x, y) != lab.at(x + 1, y)) pairs.push_back({{x, y}, {x + 1, y}});
      if (y + 1 < lab.height && lab.at(x, y) != lab.at(x, y + 1)) pairs.push_back({{x, y}, {x, y + 1}});
    }
  }
  return pairs;
}

}  // namespace mpano
