#include "mpano/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mpano/error.hpp"

namespace mpano {

PanoComposite::PanoComposite(const PanoGeometry& g)
    : geometry(g),
      rgb(g.width(), g.height(), 3),
      depth(g.width(), g.height()),
      coverage(g.width(), g.height(), 1, kNoCoverage) {}

void sample_bilinear(const RgbImage& img, double u, double v, std::uint8_t out[3]) {
  const int x0 = std::min(static_cast<int>(std::floor(u)), img.width() - 1);
  const int y0 = std::min(static_cast<int>(std::floor(v)), img.height() - 1);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  for (int c = 0; c < 3; ++c) {
    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    const double s = (1.0 - fy) * top + fy * bottom;
    out[c] = static_cast<std::uint8_t>(std::clamp(std::round(s), 0.0, 255.0));
  }
}

namespace {

bool in_sampling_domain(const CameraIntrinsics& k, const PixelCoord& p) {
  return p.u >= 0.0 && p.v >= 0.0 && p.u <= k.width - 1 && p.v <= k.height - 1;
}

// Unit ray for each row / column of the panorama; pano_inverse factored so the
// trigonometry is evaluated once per row and column.
struct RayTable {
  std::vector<double> cos_a, sin_a, cos_b, sin_b;

  explicit RayTable(const PanoGeometry& g) {
    cos_a.resize(g.width());
    sin_a.resize(g.width());
    for (int x = 0; x < g.width(); ++x) {
      const SphericalDirection d = pano_angles(x, 0, g);
      cos_a[x] = std::cos(d.alpha);
      sin_a[x] = std::sin(d.alpha);
    }
    cos_b.resize(g.height());
    sin_b.resize(g.height());
    for (int y = 0; y < g.height(); ++y) {
      const SphericalDirection d = pano_angles(0, y, g);
      cos_b[y] = std::cos(d.beta);
      sin_b[y] = std::sin(d.beta);
    }
  }

  Vec3 point(int x, int y, double depth) const {
    return {depth * sin_b[y] * cos_a[x], depth * sin_b[y] * sin_a[x], depth * cos_b[y]};
  }
};

// Minimal circular run of columns; length == width means the full circle.
struct ColumnArc {
  int start = 0;
  int length = 0;
  bool contains(int x, int width) const {
    return ((x - start) % width + width) % width < length;
  }
};

ColumnArc column_arc(const std::vector<char>& occupied) {
  const int w = static_cast<int>(occupied.size());
  int first = -1;
  for (int x = 0; x < w; ++x)
    if (occupied[x]) {
      first = x;
      break;
    }
  if (first < 0) return {0, 0};
  // longest circular gap of empty columns; the arc is its complement
  int best_gap = 0;
  int best_gap_end = first;  // column right after the gap
  int run = 0;
  for (int i = 1; i <= w; ++i) {
    const int x = (first + i) % w;
    if (!occupied[x]) {
      ++run;
    } else {
      if (run > best_gap) {
        best_gap = run;
        best_gap_end = x;
      }
      run = 0;
    }
  }
  if (best_gap == 0) return {0, w};
  return {best_gap_end, w - best_gap};
}

// Columns of `b` that are also in `a`, as one arc inside `b` (hull of the runs).
ColumnArc intersect_arcs(const ColumnArc& a, const ColumnArc& b, int width) {
  int lo = -1;
  int hi = -1;
  for (int i = 0; i < b.length; ++i) {
    const int x = (b.start + i) % width;
    if (a.contains(x, width)) {
      if (lo < 0) lo = i;
      hi = i;
    }
  }
  if (lo < 0) return {0, 0};
  return {(b.start + lo) % width, hi - lo + 1};
}

struct RowSpan {
  int begin = 0;
  int end = 0;
};

RowSpan row_span(const Mask& m) {
  RowSpan s{m.height(), 0};
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) {
        s.begin = std::min(s.begin, y);
        s.end = std::max(s.end, y + 1);
        break;
      }
  return s;
}

std::vector<char> occupied_columns(const Mask& m) {
  std::vector<char> occ(static_cast<std::size_t>(m.width()), 0);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) occ[x] = 1;
  return occ;
}

// Centroid of a panorama mask in coordinates local to `rect`, unwrapping
// columns to the half-turn around the rect centre.
Eigen::Vector2d local_centroid(const Mask& m, const PixelRect& rect) {
  const int w = m.width();
  const double cx = rect.x0 + 0.5 * (rect.width - 1);
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  double n = 0.0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y)) continue;
      double dx = x - cx;
      dx -= w * std::round(dx / w);
      s += Eigen::Vector2d(cx + dx - rect.x0, y - rect.y0);
      n += 1.0;
    }
  return n > 0.0 ? Eigen::Vector2d(s / n) : Eigen::Vector2d::Zero();
}

int fitting_levels(int requested, int w, int h) {
  const int max_levels = static_cast<int>(std::floor(std::log2(double(std::min(w, h))))) + 1;
  const int want = requested > 0 ? requested : default_blend_levels(w, h);
  return std::clamp(want, 1, std::max(1, max_levels));
}

}  // namespace

CameraRender render_camera_to_pano(const StationBundle& bundle, std::size_t cam_index,
                                   const DepthImage& pano_depth, const PanoGeometry& g) {
  if (cam_index >= bundle.camera_count()) {
    throw Error(ErrorCode::kInvalidArgument, "camera index out of range");
  }
  if (pano_depth.width() != g.width() || pano_depth.height() != g.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "panoramic depth does not match the geometry");
  }
  const CameraIntrinsics& k = bundle.intrinsics[cam_index];
  const RgbImage& img = bundle.images[cam_index];
  const RigidTransform camera_from_virtual =
      bundle.cam_poses[cam_index].transform * bundle.virtual_pose.transform.inverse();
  const RayTable rays(g);

  CameraRender out{RgbImage(g.width(), g.height(), 3), Mask(g.width(), g.height())};
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (!pano_depth.valid(x, y)) continue;
      const Vec3 pc = camera_from_virtual.apply(rays.point(x, y, pano_depth.at(x, y)));
      if (!(pc.z() > 0.0)) continue;
      const PixelCoord p = camera_to_pixel(pc, k);
      if (!in_sampling_domain(k, p)) continue;
      std::uint8_t rgb[3];
      sample_bilinear(img, p.u, p.v, rgb);
      for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = rgb[c];
      out.valid.at(x, y) = 1;
    }
  }
  return out;
}

std::vector<std::size_t> stitch_order(const StationBundle& bundle) {
  std::vector<double> azimuth(bundle.camera_count());
  for (std::size_t i = 0; i < bundle.camera_count(); ++i) {
    const Vec3 axis_world = bundle.cam_poses[i].transform.rotation().transpose() * Vec3::UnitZ();
    const Vec3 axis_virtual = bundle.virtual_pose.transform.rotation() * axis_world;
    azimuth[i] = std::atan2(axis_virtual.y(), axis_virtual.x());
  }
  std::vector<std::size_t> order(bundle.camera_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return azimuth[a] < azimuth[b]; });
  return order;
}

std::vector<DepthImage> camera_depth_maps(const StationBundle& bundle, const DensifyParams& p) {
  std::vector<DepthImage> maps;
  maps.reserve(bundle.camera_count());
  for (std::size_t i = 0; i < bundle.camera_count(); ++i) {
    const DepthImage sparse =
        project_sparse_depth(bundle.cloud, bundle.intrinsics[i], bundle.cam_poses[i].transform);
    if (sparse.valid_count() == 0) {
      maps.push_back(sparse);  // camera sees no LiDAR point; contributes nothing
      continue;
    }
    maps.push_back(densify(sparse, bundle.images[i], p));
  }
  return maps;
}

DepthImage station_pano_depth(const StationBundle& bundle, const PanoGeometry& g,
                              const DensifyParams& p) {
  const std::vector<DepthImage> maps = camera_depth_maps(bundle, p);
  const DepthImage direct = build_pano_depth(maps, bundle.rig(), bundle.virtual_pose, g);
  return fill_invalid_depth(direct, {0, g.nadir_band_start()});
}

PanoComposite stitch_station(const StationBundle& bundle, const PanoGeometry& g,
                             const StitchOptions& options) {
  bundle.validate(1);
  options.seam.validate();
  const int pw = g.width();

  PanoComposite comp(g);
  comp.depth = station_pano_depth(bundle, g, options.densify);
  Mask comp_valid(pw, g.height());

  bool first = true;
  for (std::size_t cam : stitch_order(bundle)) {
    const CameraRender r = render_camera_to_pano(bundle, cam, comp.depth, g);
    const auto cam_label = static_cast<std::int16_t>(cam);

    std::size_t shared = 0;
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < pw; ++x) shared += (r.valid.at(x, y) && comp_valid.at(x, y)) ? 1 : 0;

    auto take_new = [&](int x, int y) {
      for (int c = 0; c < 3; ++c) comp.rgb.at(x, y, c) = r.rgb.at(x, y, c);
      comp.coverage.at(x, y) = cam_label;
      comp_valid.at(x, y) = 1;
    };

    if (first || shared == 0) {
      // disjoint union
      for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < pw; ++x)
          if (r.valid.at(x, y) && !comp_valid.at(x, y)) take_new(x, y);
      first = false;
      continue;
    }

    const ColumnArc cols = intersect_arcs(column_arc(occupied_columns(comp_valid)),
                                          column_arc(occupied_columns(r.valid)), pw);
    const RowSpan rows1 = row_span(comp_valid);
    const RowSpan rows2 = row_span(r.valid);
    PixelRect rect{cols.start, std::max(rows1.begin, rows2.begin), cols.length,
                   std::min(rows1.end, rows2.end) - std::max(rows1.begin, rows2.begin)};

    OverlapRegion ov;
    ov.rect = rect;
    ov.valid1 = Mask(rect.width, rect.height);
    ov.valid2 = Mask(rect.width, rect.height);
    RgbImage win1(rect.width, rect.height, 3);
    RgbImage win2(rect.width, rect.height, 3);
    auto pano_x = [&](int lx) { return (rect.x0 + lx) % pw; };
    for (int ly = 0; ly < rect.height; ++ly) {
      for (int lx = 0; lx < rect.width; ++lx) {
        const int x = pano_x(lx);
        const int y = rect.y0 + ly;
        ov.valid1.at(lx, ly) = comp_valid.at(x, y);
        ov.valid2.at(lx, ly) = r.valid.at(x, y);
        for (int c = 0; c < 3; ++c) {
          win1.at(lx, ly, c) = comp.rgb.at(x, y, c);
          win2.at(lx, ly, c) = r.rgb.at(x, y, c);
        }
      }
    }
    ov.centroid1 = local_centroid(comp_valid, rect);
    ov.centroid2 = local_centroid(r.valid, rect);

    const SeamInput in1 = prepare_seam_input(win1, ov.valid1);
    const SeamInput in2 = prepare_seam_input(win2, ov.valid2);
    const SeamGraph graph =
        build_seam_graph(ov, in1, in2, options.seam, DegeneratePolicy::kSeedBorders);
    SeamLabeling labeling = min_cut(graph);

    // Each side borrows the other's pixels where it has none, so the
    // pyramid never mixes in unset black.
    for (int ly = 0; ly < rect.height; ++ly)
      for (int lx = 0; lx < rect.width; ++lx)
        for (int c = 0; c < 3; ++c) {
          if (!ov.valid1.at(lx, ly) && ov.valid2.at(lx, ly)) win1.at(lx, ly, c) = win2.at(lx, ly, c);
          if (!ov.valid2.at(lx, ly) && ov.valid1.at(lx, ly)) win2.at(lx, ly, c) = win1.at(lx, ly, c);
        }
    Mask select1(rect.width, rect.height);
    for (int ly = 0; ly < rect.height; ++ly)
      for (int lx = 0; lx < rect.width; ++lx) select1.at(lx, ly) = labeling.at(lx, ly) == 1 ? 1 : 0;
    const int levels = fitting_levels(options.blend_levels, rect.width, rect.height);
    const RgbImage blended = multiband_blend(win1, win2, select1, levels);

    for (int ly = 0; ly < rect.height; ++ly) {
      for (int lx = 0; lx < rect.width; ++lx) {
        if (!ov.valid1.at(lx, ly) && !ov.valid2.at(lx, ly)) continue;
        const int x = pano_x(lx);
        const int y = rect.y0 + ly;
        for (int c = 0; c < 3; ++c) comp.rgb.at(x, y, c) = blended.at(lx, ly, c);
        if (labeling.at(lx, ly) == 2 && ov.valid2.at(lx, ly)) comp.coverage.at(x, y) = cam_label;
        comp_valid.at(x, y) = 1;
      }
    }
    // new-only pixels outside the rect
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < pw; ++x) {
        if (!r.valid.at(x, y) || comp_valid.at(x, y)) continue;
        take_new(x, y);
      }
    }

    SeamRecord rec;
    rec.camera = static_cast<int>(cam);
    rec.pairs = extract_seam(labeling);
    rec.labeling = std::move(labeling);
    rec.overlap = std::move(ov);
    comp.seams.push_back(std::move(rec));
  }
  return comp;
}

std::vector<const StationBundle*> neighbor_stations(std::span<const StationBundle> stations,
                                                    std::size_t current, std::size_t max_count) {
  if (current >= stations.size()) throw Error(ErrorCode::kInvalidArgument, "station index out of range");
  const Vec3 origin = stations[current].origin_world();
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (i == current) continue;
    dist.emplace_back((stations[i].origin_world() - origin).norm(), i);
  }
  std::stable_sort(dist.begin(), dist.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<const StationBundle*> out;
  for (std::size_t i = 0; i < dist.size() && out.size() < max_count; ++i) {
    out.push_back(&stations[dist[i].second]);
  }
  return out;
}

PanoComposite fill_black_hole(const PanoComposite& composite, const StationBundle& current,
                              std::span<const StationBundle* const> neighbors,
                              const PanoGeometry& g) {
  if (neighbors.empty()) {
    throw Error(ErrorCode::kNoNeighbors, "station '" + current.station_id +
                                             "' has no neighbor to fill the nadir band from");
  }
  if (!(composite.geometry == g)) {
    throw Error(ErrorCode::kDimensionMismatch, "composite geometry differs from the requested one");
  }
  PanoComposite out = composite;
  const RayTable rays(g);

  for (int y = g.nadir_band_start(); y < g.height(); ++y) {
    const double cos_b = std::abs(rays.cos_b[y]);
    if (cos_b <= 0.0) continue;
    // flat floor at h_floor below the virtual origin
    const double depth = current.h_floor / cos_b;
    for (int x = 0; x < g.width(); ++x) {
      const Vec3 world = virtual_to_world(rays.point(x, y, depth), current.virtual_pose.transform);
      bool resolved = false;
      for (const StationBundle* nb : neighbors) {
        for (std::size_t cam = 0; cam < nb->camera_count() && !resolved; ++cam) {
          const Vec3 pc = nb->cam_poses[cam].transform.apply(world);
          if (!(pc.z() > 0.0)) continue;
          const PixelCoord p = camera_to_pixel(pc, nb->intrinsics[cam]);
          if (!in_sampling_domain(nb->intrinsics[cam], p)) continue;
          std::uint8_t rgb[3];
          sample_bilinear(nb->images[cam], p.u, p.v, rgb);
          for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = rgb[c];
          out.depth.at(x, y) = depth;
          out.coverage.at(x, y) = kNeighborCoverage;
          resolved = true;
        }
        if (resolved) break;
      }
    }
  }
  return out;
}

}  // namespace mpano
