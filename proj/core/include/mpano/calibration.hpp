#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mpano/geometry.hpp"
#include "mpano/station.hpp"

namespace mpano {

struct CameraRecord {
  CameraIntrinsics intrinsics;
  Pose pose;  // camera_from_world
  std::string image_path;
  friend bool operator==(const CameraRecord&, const CameraRecord&) = default;
};

struct StationRecord {
  std::string station_id;
  Pose virtual_pose;  // virtual_from_world
  std::vector<CameraRecord> cameras;
  std::string cloud_path;
  double h_floor = 0.0;
  friend bool operator==(const StationRecord&, const StationRecord&) = default;
};

// In-memory form of the calibration document. Paths are stored as written;
// relative paths resolve against the document's directory.
struct CalibrationFile {
  std::vector<StationRecord> stations;
  friend bool operator==(const CalibrationFile&, const CalibrationFile&) = default;
};

// Throws kParse (with line or field path) or kInvariantViolation.
CalibrationFile parse_calibration(const std::string& text);
CalibrationFile read_calibration_file(const std::filesystem::path& path);
std::string dump_calibration(const CalibrationFile& calib);
void save_calibration(const CalibrationFile& calib, const std::filesystem::path& path);

// Reads the document and everything it references into validated bundles.
std::vector<StationBundle> load_calibration(const std::filesystem::path& path);

// Pose serialization shared with the metadata document.
std::string pose_to_json(const Pose& pose);

// Sidecar written next to a panorama; consumed by the measurement tools.
struct PanoMetadata {
  int pano_width = 0;
  int pano_height = 0;
  double depth_scale_mm = 1.0;  // millimeters per stored depth unit
  double h_floor = 0.0;
  Pose virtual_pose{RigidTransform{}, FrameConvention::kVirtualFromWorld};
  std::string station_id;
  std::string depth_path;
  std::string rgb_path;
  friend bool operator==(const PanoMetadata&, const PanoMetadata&) = default;
};

std::string dump_metadata(const PanoMetadata& meta);
PanoMetadata parse_metadata(const std::string& text);
PanoMetadata read_metadata_file(const std::filesystem::path& path);
void save_metadata(const PanoMetadata& meta, const std::filesystem::path& path);

}  // namespace mpano
