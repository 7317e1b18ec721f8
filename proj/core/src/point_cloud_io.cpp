#include "mpano/point_cloud_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpano/error.hpp"

namespace mpano {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
}

double parse_number(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    fail(line_no, "malformed number '" + std::string(tok) + "'");
  }
  return v;
}

PointCloud read_ply_body(std::istream& in, std::size_t& line_no) {
  std::string line;
  bool ascii = false;
  bool in_vertex = false;
  bool seen_vertex = false;
  std::size_t vertex_count = 0;
  std::vector<std::string> vertex_props;
  // elements declared before "vertex" must be skipped line by line
  std::size_t lines_before_vertex = 0;

  for (;;) {
    if (!std::getline(in, line)) fail(line_no, "unexpected end of PLY header");
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") fail(line_no, "only ASCII PLY is supported");
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() < 3) fail(line_no, "malformed element declaration");
      const auto count = static_cast<std::size_t>(parse_number(tok[2], line_no));
      in_vertex = tok[1] == "vertex";
      if (in_vertex) {
        seen_vertex = true;
        vertex_count = count;
      } else if (!seen_vertex) {
        lines_before_vertex += count;
      }
    } else if (tok[0] == "property") {
      if (!in_vertex) continue;
      if (tok.size() >= 2 && tok[1] == "list") fail(line_no, "list properties on vertices are not supported");
      if (tok.size() < 3) fail(line_no, "malformed property declaration");
      vertex_props.emplace_back(tok[2]);
    } else if (tok[0] == "end_header") {
      break;
    }
  }
  if (!ascii) fail(line_no, "PLY header lacks an ascii format line");
  if (!seen_vertex) fail(line_no, "PLY has no vertex element");

  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < vertex_props.size(); ++i) {
    if (vertex_props[i] == "x") ix = static_cast<int>(i);
    if (vertex_props[i] == "y") iy = static_cast<int>(i);
    if (vertex_props[i] == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) fail(line_no, "vertex element lacks x, y or z");

  for (std::size_t i = 0; i < lines_before_vertex; ++i) {
    if (!std::getline(in, line)) fail(line_no, "unexpected end of PLY data");
    ++line_no;
  }

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  while (cloud.points.size() < vertex_count) {
    if (!std::getline(in, line)) fail(line_no, "expected " + std::to_string(vertex_count) + " vertices");
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < vertex_props.size()) fail(line_no, "vertex record has too few values");
    std::vector<double> values;
    values.reserve(tok.size());
    for (auto t : tok) values.push_back(parse_number(t, line_no));
    cloud.points.emplace_back(values[ix], values[iy], values[iz]);
  }
  return cloud;
}

PointCloud read_xyz_body(std::istream& in, std::string first_line, std::size_t& line_no) {
  PointCloud cloud;
  std::string line = std::move(first_line);
  bool have = true;
  while (have) {
    const auto tok = split_ws(line);
    if (!tok.empty() && tok[0].front() != '#') {
      if (tok.size() < 3) fail(line_no, "expected at least 3 values");
      Vec3 p(parse_number(tok[0], line_no), parse_number(tok[1], line_no),
             parse_number(tok[2], line_no));
      for (std::size_t i = 3; i < tok.size(); ++i) parse_number(tok[i], line_no);
      cloud.points.push_back(p);
    }
    have = static_cast<bool>(std::getline(in, line));
    if (have) ++line_no;
  }
  return cloud;
}

}  // namespace

PointCloud read_point_cloud(std::istream& in) {
  std::string first;
  std::size_t line_no = 0;
  if (!std::getline(in, first)) return {};
  ++line_no;
  const auto tok = split_ws(first);
  PointCloud cloud = (!tok.empty() && tok[0] == "ply") ? read_ply_body(in, line_no)
                                                       : read_xyz_body(in, first, line_no);
  for (const Vec3& p : cloud.points) {
    if (!p.allFinite()) throw Error(ErrorCode::kParse, "non-finite coordinate in point cloud");
  }
  return cloud;
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return read_point_cloud(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_ply(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  out.precision(17);
  for (const Vec3& p : cloud.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace mpano
