#include "pcad/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pcad {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
      ++i;
    }
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
      ++j;
    }
    if (j > i) {
      tokens.push_back(line.substr(i, j - i));
    }
    i = j;
  }
  return tokens;
}

double parse_number(std::string_view token, int line_no) {
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw parse_error("line " + std::to_string(line_no) +
                      ": malformed numeric token '" + std::string(token) + "'");
  }
  return value;
}

Vec3 parse_vec3(const std::vector<std::string_view>& tokens, int line_no) {
  if (tokens.size() < 4) {
    throw parse_error("line " + std::to_string(line_no) +
                      ": expected three coordinates");
  }
  return {parse_number(tokens[1], line_no), parse_number(tokens[2], line_no),
          parse_number(tokens[3], line_no)};
}

Vec3 renormalize(const Vec3& n, int line_no) {
  const double len = n.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw parse_error("line " + std::to_string(line_no) +
                      ": normal has zero or non-finite length");
  }
  return n / len;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw data_error("cannot open '" + tmp + "' for writing");
    }
    out << contents;
    if (!out) {
      throw data_error("write failed for '" + tmp + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

PointCloud parse_obj(std::istream& in) {
  PointCloud cloud;
  std::vector<Vec3> normals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    const auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    if (tokens[0] == "v") {
      cloud.points.push_back(parse_vec3(tokens, line_no));
    } else if (tokens[0] == "vn") {
      normals.push_back(renormalize(parse_vec3(tokens, line_no), line_no));
    }
    // Faces, texture coordinates, and other statements are ignored.
  }
  if (cloud.points.empty()) {
    throw parse_error("no vertex lines in OBJ input");
  }
  if (normals.size() == cloud.points.size()) {
    cloud.normals = std::move(normals);
  }
  return cloud;
}

PointCloud read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open '" + path + "'");
  }
  return parse_obj(in);
}

void write_obj(std::ostream& out, const PointCloud& cloud) {
  for (const auto& p : cloud.points) {
    out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << '\n';
  }
  for (const auto& n : cloud.normals) {
    out << "vn " << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
        << format_double(n.z()) << '\n';
  }
}

void write_obj(const std::string& path, const PointCloud& cloud) {
  std::ostringstream out;
  write_obj(out, cloud);
  write_file_atomic(path, out.str());
}

PlyData parse_ply(std::istream& in) {
  std::string line;
  int line_no = 0;

  auto next_line = [&]() -> std::vector<std::string_view> {
    while (std::getline(in, line)) {
      ++line_no;
      auto tokens = tokenize(line);
      if (!tokens.empty()) {
        return tokens;
      }
    }
    throw parse_error("unexpected end of PLY input at line " +
                      std::to_string(line_no));
  };

  auto magic = next_line();
  if (magic.size() != 1 || magic[0] != "ply") {
    throw parse_error("missing 'ply' magic line");
  }

  long vertex_count = -1;
  std::vector<std::string> vertex_props;
  bool in_vertex_element = false;
  bool format_seen = false;
  while (true) {
    auto tokens = next_line();
    if (tokens[0] == "end_header") {
      break;
    }
    if (tokens[0] == "comment") {
      continue;
    }
    if (tokens[0] == "format") {
      if (tokens.size() < 2 || tokens[1] != "ascii") {
        throw parse_error("only ASCII PLY is supported");
      }
      format_seen = true;
    } else if (tokens[0] == "element") {
      in_vertex_element = tokens.size() >= 3 && tokens[1] == "vertex";
      if (in_vertex_element) {
        vertex_count = static_cast<long>(parse_number(
            {tokens[2].data(), tokens[2].size()}, line_no));
      }
    } else if (tokens[0] == "property" && in_vertex_element) {
      if (tokens.size() < 3) {
        throw parse_error("line " + std::to_string(line_no) +
                          ": malformed property");
      }
      vertex_props.emplace_back(tokens.back());
    }
  }
  if (!format_seen) {
    throw parse_error("PLY header lacks a format line");
  }
  if (vertex_count < 1) {
    throw parse_error("PLY input has no vertex element");
  }

  auto column = [&](const char* name) -> int {
    for (size_t i = 0; i < vertex_props.size(); ++i) {
      if (vertex_props[i] == name) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  const int cx = column("x"), cy = column("y"), cz = column("z");
  const int cnx = column("nx"), cny = column("ny"), cnz = column("nz");
  const int cs = column("anomaly_score");
  if (cx < 0 || cy < 0 || cz < 0) {
    throw parse_error("PLY vertex element lacks x,y,z properties");
  }
  const bool has_normals = cnx >= 0 && cny >= 0 && cnz >= 0;
  if ((cnx >= 0 || cny >= 0 || cnz >= 0) && !has_normals) {
    throw parse_error("PLY normals must provide all of nx,ny,nz");
  }

  PlyData result;
  result.cloud.points.reserve(vertex_count);
  for (long v = 0; v < vertex_count; ++v) {
    auto tokens = next_line();
    if (tokens.size() < vertex_props.size()) {
      throw parse_error("line " + std::to_string(line_no) +
                        ": expected " + std::to_string(vertex_props.size()) +
                        " vertex values");
    }
    auto value = [&](int col) { return parse_number(tokens[col], line_no); };
    result.cloud.points.emplace_back(value(cx), value(cy), value(cz));
    if (has_normals) {
      result.cloud.normals.push_back(
          renormalize({value(cnx), value(cny), value(cnz)}, line_no));
    }
    if (cs >= 0) {
      result.scores.push_back(value(cs));
    }
  }
  return result;
}

PlyData read_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open '" + path + "'");
  }
  return parse_ply(in);
}

void write_ply(std::ostream& out, const PointCloud& cloud,
               const std::vector<double>* scores) {
  if (scores && scores->size() != cloud.points.size()) {
    throw data_error("score channel size does not match point count");
  }
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.points.size() << '\n';
  out << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals()) {
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  }
  if (scores) {
    out << "property double anomaly_score\n";
  }
  out << "end_header\n";
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z());
    if (cloud.has_normals()) {
      const auto& n = cloud.normals[i];
      out << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
          << format_double(n.z());
    }
    if (scores) {
      out << ' ' << format_double((*scores)[i]);
    }
    out << '\n';
  }
}

void write_ply(const std::string& path, const PointCloud& cloud,
               const std::vector<double>* scores) {
  std::ostringstream out;
  write_ply(out, cloud, scores);
  write_file_atomic(path, out.str());
}

void write_score_csv(std::ostream& out, const PointCloud& cloud,
                     const std::vector<double>& scores) {
  if (scores.size() != cloud.points.size()) {
    throw data_error("score count does not match point count");
  }
  out << "x,y,z,score\n";
  char buf[128];
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g\n", p.x(), p.y(),
                  p.z(), scores[i]);
    out << buf;
  }
}

void write_score_csv(const std::string& path, const PointCloud& cloud,
                     const std::vector<double>& scores) {
  std::ostringstream out;
  write_score_csv(out, cloud, scores);
  write_file_atomic(path, out.str());
}

void write_offset_csv(const std::string& path, const std::vector<Vec3>& offsets) {
  std::ostringstream out;
  out << "dx,dy,dz\n";
  for (const auto& o : offsets) {
    out << format_double(o.x()) << ',' << format_double(o.y()) << ','
        << format_double(o.z()) << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_mask_csv(const std::string& path, const std::vector<bool>& mask) {
  std::ostringstream out;
  for (const bool m : mask) {
    out << (m ? '1' : '0') << '\n';
  }
  write_file_atomic(path, out.str());
}

std::vector<bool> read_mask_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open '" + path + "'");
  }
  std::vector<bool> mask;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    if (tokens[0] == "1") {
      mask.push_back(true);
    } else if (tokens[0] == "0") {
      mask.push_back(false);
    } else {
      throw parse_error("line " + std::to_string(line_no) +
                        ": mask entries must be 0 or 1");
    }
  }
  return mask;
}

PointCloud read_cloud(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".obj") {
    return read_obj(path);
  }
  if (ext == ".ply") {
    return read_ply(path).cloud;
  }
  throw data_error("unsupported point cloud format '" + ext + "'");
}

}  // namespace pcad
