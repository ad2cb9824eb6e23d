#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcad/types.hpp"

namespace pcad {

class parse_error : public data_error {
 public:
  explicit parse_error(const std::string& what) : data_error(what) {}
};

// OBJ: `v x y z` and `vn x y z` lines, `#` comments; faces and other
// statements are ignored. Normals attach only when the vn count equals
// the v count, and are renormalized to unit length.
PointCloud parse_obj(std::istream& in);
PointCloud read_obj(const std::string& path);
void write_obj(std::ostream& out, const PointCloud& cloud);
void write_obj(const std::string& path, const PointCloud& cloud);

// ASCII PLY with vertex properties x,y,z[,nx,ny,nz][,anomaly_score].
struct PlyData {
  PointCloud cloud;
  std::vector<double> scores;  // empty when the file has no score channel
};

PlyData parse_ply(std::istream& in);
PlyData read_ply(const std::string& path);
void write_ply(std::ostream& out, const PointCloud& cloud,
               const std::vector<double>* scores = nullptr);
void write_ply(const std::string& path, const PointCloud& cloud,
               const std::vector<double>* scores = nullptr);

// One row per point: x,y,z,score with 6 significant digits.
void write_score_csv(std::ostream& out, const PointCloud& cloud,
                     const std::vector<double>& scores);
void write_score_csv(const std::string& path, const PointCloud& cloud,
                     const std::vector<double>& scores);

// One `dx,dy,dz` row per point, full precision.
void write_offset_csv(const std::string& path, const std::vector<Vec3>& offsets);

// One 0/1 row per point.
void write_mask_csv(const std::string& path, const std::vector<bool>& mask);
std::vector<bool> read_mask_csv(const std::string& path);

// Loads a cloud by extension (.obj or .ply).
PointCloud read_cloud(const std::string& path);

// Full-precision decimal formatting shared by all writers; round-trips
// doubles exactly.
std::string format_double(double v);

// Atomic write: stream to `path.tmp`, then rename over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace pcad
