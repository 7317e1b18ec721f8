#include "mpano/calibration.hpp"

#include <fstream>
#include <sstream>

#include <Eigen/SVD>
#include "json.hpp"

#include "mpano/error.hpp"
#include "mpano/image_io.hpp"
#include "mpano/point_cloud_io.hpp"

namespace mpano {

using nlohmann::json;

namespace {

// Hand-written calibration files rarely carry 1e-9 orthonormality; anything
// this close is snapped to the nearest rotation, anything else is rejected.
constexpr double kParseRotationTolerance = 1e-6;

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParse, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) field_error(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(where + "." + key, "missing");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) field_error(where + "." + key, "expected a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) field_error(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) field_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& obj, const char* key, std::size_t n, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array() || v.size() != n) {
    field_error(where + "." + key, "expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) field_error(where + "." + key, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Mat3 snap_rotation(const Mat3& m, const std::string& where) {
  if (is_rotation(m)) return m;
  if (!is_rotation(m, kParseRotationTolerance)) {
    throw Error(ErrorCode::kInvariantViolation, where + ": rotation is not orthonormal with det +1");
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Pose parse_pose(const json& j, FrameConvention expected, const std::string& where) {
  const std::string conv = text(j, "convention", where);
  if (conv != to_string(expected)) {
    field_error(where + ".convention", "expected \"" + std::string(to_string(expected)) +
                                           "\", got \"" + conv + "\"");
  }
  const auto r = numbers(j, "rotation", 9, where);
  const auto t = numbers(j, "translation", 3, where);
  Mat3 m;
  m << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
  return {RigidTransform(snap_rotation(m, where + ".rotation"), Vec3(t[0], t[1], t[2])), expected};
}

json pose_json(const Pose& p) {
  const Mat3& r = p.transform.rotation();
  const Vec3& t = p.transform.translation();
  json rot = json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) rot.push_back(r(i, k));
  return {{"convention", to_string(p.convention)},
          {"rotation", rot},
          {"translation", {t.x(), t.y(), t.z()}}};
}

json parse_json_text(const std::string& text_in) {
  try {
    return json::parse(text_in);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text_in.size());
    for (std::size_t i = 0; i + 1 < end; ++i) line += text_in[i] == '\n' ? 1 : 0;
    throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + e.what());
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& content, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace

CalibrationFile parse_calibration(const std::string& doc_text) {
  const json doc = parse_json_text(doc_text);
  const json& stations = require(doc, "stations", "$");
  if (!stations.is_array()) field_error("$.stations", "expected an array");

  CalibrationFile calib;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    const std::string where = "$.stations[" + std::to_string(s) + "]";
    const json& js = stations[s];
    StationRecord st;
    st.station_id = text(js, "station_id", where);
    st.h_floor = number(js, "h_floor", where);
    st.cloud_path = text(js, "cloud_path", where);
    st.virtual_pose = parse_pose(require(js, "virtual_pose", where), FrameConvention::kVirtualFromWorld,
                                 where + ".virtual_pose");
    const json& cams = require(js, "cameras", where);
    if (!cams.is_array()) field_error(where + ".cameras", "expected an array");
    for (std::size_t c = 0; c < cams.size(); ++c) {
      const std::string cw = where + ".cameras[" + std::to_string(c) + "]";
      const json& jc = cams[c];
      CameraRecord cam;
      const json& k = require(jc, "intrinsics", cw);
      const std::string kw = cw + ".intrinsics";
      cam.intrinsics = {number(k, "fx", kw), number(k, "fy", kw), number(k, "u0", kw),
                        number(k, "v0", kw), integer(k, "width", kw), integer(k, "height", kw)};
      if (!cam.intrinsics.valid()) {
        throw Error(ErrorCode::kInvariantViolation,
                    kw + ": need fx, fy > 0 and the principal point inside the sensor");
      }
      cam.pose = parse_pose(require(jc, "pose", cw), FrameConvention::kCameraFromWorld, cw + ".pose");
      cam.image_path = text(jc, "image_path", cw);
      st.cameras.push_back(std::move(cam));
    }
    if (!(st.h_floor > 0.0)) {
      throw Error(ErrorCode::kInvariantViolation, where + " (" + st.station_id + "): h_floor must be positive");
    }
    calib.stations.push_back(std::move(st));
  }
  return calib;
}

CalibrationFile read_calibration_file(const std::filesystem::path& path) {
  try {
    return parse_calibration(slurp(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string dump_calibration(const CalibrationFile& calib) {
  json stations = json::array();
  for (const StationRecord& st : calib.stations) {
    json cams = json::array();
    for (const CameraRecord& c : st.cameras) {
      const CameraIntrinsics& k = c.intrinsics;
      cams.push_back({{"intrinsics",
                       {{"fx", k.fx}, {"fy", k.fy}, {"u0", k.u0}, {"v0", k.v0},
                        {"width", k.width}, {"height", k.height}}},
                      {"pose", pose_json(c.pose)},
                      {"image_path", c.image_path}});
    }
    stations.push_back({{"station_id", st.station_id},
                        {"h_floor", st.h_floor},
                        {"cloud_path", st.cloud_path},
                        {"virtual_pose", pose_json(st.virtual_pose)},
                        {"cameras", cams}});
  }
  return json{{"stations", stations}}.dump(2) + "\n";
}

void save_calibration(const CalibrationFile& calib, const std::filesystem::path& path) {
  spit(dump_calibration(calib), path);
}

std::vector<StationBundle> load_calibration(const std::filesystem::path& path) {
  const CalibrationFile calib = read_calibration_file(path);
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  std::vector<StationBundle> bundles;
  for (const StationRecord& st : calib.stations) {
    StationBundle b;
    b.station_id = st.station_id;
    b.virtual_pose = st.virtual_pose;
    b.h_floor = st.h_floor;
    b.cloud = read_point_cloud(resolve(st.cloud_path));
    for (const CameraRecord& c : st.cameras) {
      b.intrinsics.push_back(c.intrinsics);
      b.cam_poses.push_back(c.pose);
      b.images.push_back(read_rgb_png(resolve(c.image_path)));
    }
    b.validate();
    bundles.push_back(std::move(b));
  }
  return bundles;
}

std::string pose_to_json(const Pose& pose) { return pose_json(pose).dump(); }

std::string dump_metadata(const PanoMetadata& m) {
  const json doc = {{"pano_width", m.pano_width},   {"pano_height", m.pano_height},
                    {"depth_scale_mm", m.depth_scale_mm}, {"h_floor", m.h_floor},
                    {"virtual_pose", pose_json(m.virtual_pose)}, {"station_id", m.station_id},
                    {"depth_path", m.depth_path}, {"rgb_path", m.rgb_path}};
  return doc.dump(2) + "\n";
}

PanoMetadata parse_metadata(const std::string& doc_text) {
  const json doc = parse_json_text(doc_text);
  PanoMetadata m;
  m.pano_width = integer(doc, "pano_width", "$");
  m.pano_height = integer(doc, "pano_height", "$");
  m.depth_scale_mm = number(doc, "depth_scale_mm", "$");
  m.h_floor = number(doc, "h_floor", "$");
  m.virtual_pose = parse_pose(require(doc, "virtual_pose", "$"), FrameConvention::kVirtualFromWorld,
                              "$.virtual_pose");
  m.station_id = text(doc, "station_id", "$");
  m.depth_path = text(doc, "depth_path", "$");
  m.rgb_path = text(doc, "rgb_path", "$");
  if (!(m.depth_scale_mm > 0.0)) throw Error(ErrorCode::kInvariantViolation, "depth_scale_mm must be positive");
  return m;
}

PanoMetadata read_metadata_file(const std::filesystem::path& path) {
  try {
    return parse_metadata(slurp(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void save_metadata(const PanoMetadata& meta, const std::filesystem::path& path) {
  spit(dump_metadata(meta), path);
}

}  // namespace mpano
