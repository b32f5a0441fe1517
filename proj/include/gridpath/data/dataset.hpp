#pragma once

#include <string>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/io/kv.hpp"

namespace gridpath::data {

struct TrackPoint {
  long long frame = 0;
  long long ped_id = 0;
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

struct Bounds {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;

  bool valid() const { return x_min < x_max && y_min < y_max; }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

struct SceneDataset {
  std::string scene_id;
  Bounds bounds;          // invalid when the dataset is empty
  long long frame_stride = 1;
  double fps = 2.5;
  std::vector<TrackPoint> points;  // sorted by (frame, ped_id)
};

// Which source column feeds which field; Skip ignores a column.
enum class Column { Frame, PedId, X, Y, Skip };

struct AnnotationSchema {
  std::vector<Column> columns{Column::Frame, Column::PedId, Column::X,
                              Column::Y};
  // '\0' means "any whitespace run".
  char delimiter = '\0';
};

// Parses "frame,ped_id,x,y" (tokens: frame, ped_id, x, y, skip/_) and
// "space" | "comma" | "tab" | single character.
AnnotationSchema make_schema(const std::string& columns,
                             const std::string& delimiter);

// Parse + sort + validate; bounds from the data's bounding box padded by 1%
// per axis (0.5 m on a degenerate axis); frame stride from the GCD of frame
// gaps. A leading line starting with a letter is treated as a header.
SceneDataset parse_annotations(const std::string& text,
                               const AnnotationSchema& schema,
                               const std::string& scene_id);

SceneDataset load_annotations(const std::string& path,
                              const AnnotationSchema& schema,
                              const std::string& scene_id);

// Canonical CSV: header `frame,ped_id,x_m,y_m`, shortest round-trip floats.
std::string export_csv(const SceneDataset& d);
SceneDataset load_canonical_csv(const std::string& path,
                                const std::string& scene_id);

// Scene metadata sidecar (scene_id, bounds, fps, frame_stride).
std::string export_metadata(const SceneDataset& d);
void apply_metadata(SceneDataset& d, const io::KvFile& kv);

Bounds padded_bounds(const std::vector<TrackPoint>& points);

// Affine map into the half-open unit square; points on the max edge land on
// the largest double below 1. Out-of-bounds points are rejected by name.
Vec2 to_unit(Vec2 p, const Bounds& b);
Vec2 from_unit(Vec2 u, const Bounds& b);
Vec2 clamp_to_bounds(Vec2 p, const Bounds& b);

}  // namespace gridpath::data
