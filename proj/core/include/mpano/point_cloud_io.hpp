#pragma once

#include <filesystem>
#include <iosfwd>

#include "mpano/depth_fusion.hpp"

namespace mpano {

// ASCII PLY (vertex element with x, y, z among its properties) or plain
// whitespace-separated "x y z" text. Detected from the first line.
PointCloud read_point_cloud(const std::filesystem::path& path);
PointCloud read_point_cloud(std::istream& in);

void write_ply(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace mpano
