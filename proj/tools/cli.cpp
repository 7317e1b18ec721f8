#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mpano/calibration.hpp"
#include "mpano/depth_fusion.hpp"
#include "mpano/error.hpp"
#include "mpano/image_io.hpp"
#include "mpano/measure.hpp"
#include "mpano/pipeline.hpp"
#include "mpano/synth.hpp"

namespace mpano {

namespace fs = std::filesystem;

namespace {

struct Args {
  std::string calib;
  std::string out = ".";
  int station = 0;
  int pano_width = 8192;
  double seam_w = 0.5;
  int blend_levels = 0;
  int neighbors = 1;
  std::uint64_t seed = 1;
  int pattern = 0;
  std::string meta;
  std::vector<double> px;
};

void make_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out + ": " + ec.message());
}

std::vector<StationBundle> load_checked(const Args& a) {
  auto bundles = load_calibration(a.calib);
  if (a.station < 0 || static_cast<std::size_t>(a.station) >= bundles.size()) {
    throw Error(ErrorCode::kOutOfRange, "station index " + std::to_string(a.station) + " not in calibration (" +
                                            std::to_string(bundles.size()) + " stations)");
  }
  return bundles;
}

std::string camera_stem(const StationBundle& b, std::size_t c) {
  return b.station_id + "_cam" + std::to_string(c);
}

void run_project(const Args& a) {
  const auto bundles = load_checked(a);
  const StationBundle& b = bundles[static_cast<std::size_t>(a.station)];
  make_out_dir(a.out);
  for (std::size_t c = 0; c < b.camera_count(); ++c) {
    const DepthImage sparse = project_sparse_depth(b.cloud, b.intrinsics[c], b.cam_poses[c].transform);
    const fs::path path = fs::path(a.out) / (camera_stem(b, c) + "_sparse.png");
    write_depth_png(sparse, path);
    std::cout << path.string() << " " << sparse.valid_count() << " samples\n";
  }
}

void run_densify(const Args& a) {
  const auto bundles = load_checked(a);
  const StationBundle& b = bundles[static_cast<std::size_t>(a.station)];
  make_out_dir(a.out);
  const auto maps = camera_depth_maps(b, DensifyParams{});
  for (std::size_t c = 0; c < maps.size(); ++c) {
    const fs::path path = fs::path(a.out) / (camera_stem(b, c) + "_dense.png");
    write_depth_png(maps[c], path);
    std::cout << path.string() << "\n";
  }
}

void run_pano(const Args& a) {
  const auto bundles = load_checked(a);
  const std::size_t current = static_cast<std::size_t>(a.station);
  const StationBundle& b = bundles[current];
  const PanoGeometry g = PanoGeometry::from_width(a.pano_width);

  StitchOptions opt;
  opt.seam.w = a.seam_w;
  opt.blend_levels = a.blend_levels;
  PanoComposite pano = stitch_station(b, g, opt);
  if (a.neighbors > 0 && bundles.size() > 1) {
    const auto nb = neighbor_stations(bundles, current, static_cast<std::size_t>(a.neighbors));
    pano = fill_black_hole(pano, b, nb, g);
  }

  make_out_dir(a.out);
  PanoMetadata meta;
  meta.pano_width = g.width();
  meta.pano_height = g.height();
  meta.h_floor = b.h_floor;
  meta.virtual_pose = b.virtual_pose;
  meta.station_id = b.station_id;
  meta.rgb_path = b.station_id + "_rgb.png";
  meta.depth_path = b.station_id + "_depth.png";
  const fs::path out(a.out);
  write_png(pano.rgb, out / meta.rgb_path);
  write_depth_png(pano.depth, out / meta.depth_path);
  save_metadata(meta, out / (b.station_id + ".json"));
  std::cout << (out / (b.station_id + ".json")).string() << "\n";
}

void run_measure(const Args& a) {
  const fs::path meta_path(a.meta);
  const PanoMetadata meta = read_metadata_file(meta_path);
  const fs::path depth_path = fs::path(meta.depth_path).is_absolute()
                                  ? fs::path(meta.depth_path)
                                  : meta_path.parent_path() / meta.depth_path;
  DepthImage depth = read_depth_png(depth_path);
  if (meta.depth_scale_mm != 1.0) {
    for (double& d : depth.data()) d *= meta.depth_scale_mm;
  }
  const PanoGeometry g(meta.pano_width, meta.pano_height);
  const MeasuredSegment m = measure_distance({a.px[0], a.px[1]}, {a.px[2], a.px[3]}, depth,
                                             meta.virtual_pose.transform, g);
  std::printf("%.3f\n", m.length);
  std::printf("%.3f %.3f %.3f\n", m.w1.x(), m.w1.y(), m.w1.z());
  std::printf("%.3f %.3f %.3f\n", m.w2.x(), m.w2.y(), m.w2.z());
}

void run_synth(const Args& a) {
  SceneSpec spec;
  spec.seed = a.seed;
  spec.pattern = static_cast<TexturePattern>(a.pattern);
  save_scene(synth_scene(spec), a.out);
  std::cout << (fs::path(a.out) / "calibration.json").string() << "\n";
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Measurable panorama builder"};
  app.require_subcommand(1);
  Args a;

  auto add_calib = [&](CLI::App* sub) {
    sub->add_option("calibration", a.calib, "Calibration document")->required()->check(CLI::ExistingFile);
    sub->add_option("--station", a.station, "Station index in the calibration");
    sub->add_option("--out", a.out, "Output directory");
  };

  CLI::App* project = app.add_subcommand("project", "Sparse depth PNG per camera");
  add_calib(project);
  CLI::App* densify_cmd = app.add_subcommand("densify", "Dense depth PNG per camera");
  add_calib(densify_cmd);

  CLI::App* pano = app.add_subcommand("pano", "Stitched RGB + depth panorama with metadata");
  add_calib(pano);
  pano->add_option("--pano-width", a.pano_width, "Panorama width (even; height = width / 2)")
      ->check(CLI::PositiveNumber);
  pano->add_option("--seam-w", a.seam_w, "Seam colour weight in [0, 1]")->check(CLI::Range(0.0, 1.0));
  pano->add_option("--blend-levels", a.blend_levels, "Pyramid levels, 0 = automatic")
      ->check(CLI::NonNegativeNumber);
  pano->add_option("--neighbors", a.neighbors, "Neighbor stations for the nadir fill, 0 = none")
      ->check(CLI::NonNegativeNumber);

  CLI::App* measure = app.add_subcommand("measure", "Distance between two panorama pixels");
  measure->add_option("metadata", a.meta, "Panorama metadata document")->required()->check(CLI::ExistingFile);
  measure->add_option("--px", a.px, "u1 v1 u2 v2")->required()->expected(4);

  CLI::App* synth = app.add_subcommand("synth", "Write the synthetic box-room scene");
  synth->add_option("--out", a.out, "Output directory");
  synth->add_option("--seed", a.seed, "Cloud jitter seed");
  synth->add_option("--pattern", a.pattern, "Texture pattern id (0 checker, 1 flat)")->check(CLI::Range(0, 1));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (project->parsed()) run_project(a);
    if (densify_cmd->parsed()) run_densify(a);
    if (pano->parsed()) run_pano(a);
    if (measure->parsed()) run_measure(a);
    if (synth->parsed()) run_synth(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace mpano
