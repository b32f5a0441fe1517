#include "gridpath/data/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gridpath/io/format.hpp"

namespace gridpath::data {

namespace {

std::vector<std::string> split_tokens(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == '\0') {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

AnnotationSchema make_schema(const std::string& columns,
                             const std::string& delimiter) {
  AnnotationSchema s;
  s.columns.clear();
  bool have_frame = false, have_id = false, have_x = false, have_y = false;
  for (const std::string& tok : split_tokens(columns, ',')) {
    const std::string t = trimmed(tok);
    if (t == "frame") {
      s.columns.push_back(Column::Frame);
      have_frame = true;
    } else if (t == "ped_id" || t == "id") {
      s.columns.push_back(Column::PedId);
      have_id = true;
    } else if (t == "x" || t == "x_m") {
      s.columns.push_back(Column::X);
      have_x = true;
    } else if (t == "y" || t == "y_m") {
      s.columns.push_back(Column::Y);
      have_y = true;
    } else if (t == "skip" || t == "_") {
      s.columns.push_back(Column::Skip);
    } else {
      throw ConfigError("schema: unknown column '" + t + "'");
    }
  }
  if (!(have_frame && have_id && have_x && have_y))
    throw ConfigError("schema must name frame, ped_id, x and y columns");

  if (delimiter == "space" || delimiter == "whitespace") {
    s.delimiter = '\0';
  } else if (delimiter == "comma") {
    s.delimiter = ',';
  } else if (delimiter == "tab") {
    s.delimiter = '\t';
  } else if (delimiter.size() == 1) {
    s.delimiter = delimiter[0];
  } else {
    throw ConfigError("schema: unknown delimiter '" + delimiter + "'");
  }
  return s;
}

Bounds padded_bounds(const std::vector<TrackPoint>& points) {
  Bounds b;
  if (points.empty()) return b;  // invalid, flagged by Bounds::valid()
  b.x_min = b.x_max = points[0].x;
  b.y_min = b.y_max = points[0].y;
  for (const TrackPoint& p : points) {
    b.x_min = std::min(b.x_min, p.x);
    b.x_max = std::max(b.x_max, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.y_max = std::max(b.y_max, p.y);
  }
  const double pad_x = b.x_max > b.x_min ? 0.01 * (b.x_max - b.x_min) : 0.5;
  const double pad_y = b.y_max > b.y_min ? 0.01 * (b.y_max - b.y_min) : 0.5;
  b.x_min -= pad_x;
  b.x_max += pad_x;
  b.y_min -= pad_y;
  b.y_max += pad_y;
  return b;
}

SceneDataset parse_annotations(const std::string& text,
                               const AnnotationSchema& schema,
                               const std::string& scene_id) {
  SceneDataset d;
  d.scene_id = scene_id;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    if (first_content_line) {
      first_content_line = false;
      if (std::isalpha(static_cast<unsigned char>(t[0]))) continue;  // header
    }
    const std::vector<std::string> toks = split_tokens(t, schema.delimiter);
    if (toks.size() != schema.columns.size())
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                      std::to_string(schema.columns.size()) +
                      " columns, got " + std::to_string(toks.size()));
    TrackPoint p;
    const std::string where = "line " + std::to_string(lineno);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      switch (schema.columns[i]) {
        case Column::Frame:
          p.frame = io::parse_int(trimmed(toks[i]), where + " frame");
          break;
        case Column::PedId:
          p.ped_id = io::parse_int(trimmed(toks[i]), where + " ped_id");
          break;
        case Column::X:
          p.x = io::parse_double(trimmed(toks[i]), where + " x");
          break;
        case Column::Y:
          p.y = io::parse_double(trimmed(toks[i]), where + " y");
          break;
        case Column::Skip:
          break;
      }
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw DataError(where + ": non-finite coordinate");
    d.points.push_back(p);
  }

  std::sort(d.points.begin(), d.points.end(),
            [](const TrackPoint& a, const TrackPoint& b) {
              if (a.frame != b.frame) return a.frame < b.frame;
              return a.ped_id < b.ped_id;
            });
  for (std::size_t i = 1; i < d.points.size(); ++i)
    if (d.points[i].frame == d.points[i - 1].frame &&
        d.points[i].ped_id == d.points[i - 1].ped_id)
      throw DataError("duplicate (frame, ped_id) pair: frame " +
                      std::to_string(d.points[i].frame) + ", ped " +
                      std::to_string(d.points[i].ped_id));

  d.bounds = padded_bounds(d.points);

  std::vector<long long> frames;
  frames.reserve(d.points.size());
  for (const TrackPoint& p : d.points) frames.push_back(p.frame);
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
  long long g = 0;
  for (std::size_t i = 1; i < frames.size(); ++i)
    g = std::gcd(g, frames[i] - frames[i - 1]);
  d.frame_stride = g > 0 ? g : 1;
  return d;
}

SceneDataset load_annotations(const std::string& path,
                              const AnnotationSchema& schema,
                              const std::string& scene_id) {
  std::string text;
  try {
    text = io::load_text(path);
  } catch (const ConfigError&) {
    throw DataError("cannot open annotation file: " + path);
  }
  return parse_annotations(text, schema, scene_id);
}

std::string export_csv(const SceneDataset& d) {
  std::string out = "frame,ped_id,x_m,y_m\n";
  for (const TrackPoint& p : d.points) {
    out += io::format_int(p.frame);
    out += ',';
    out += io::format_int(p.ped_id);
    out += ',';
    out += io::format_double(p.x);
    out += ',';
    out += io::format_double(p.y);
    out += '\n';
  }
  return out;
}

SceneDataset load_canonical_csv(const std::string& path,
                                const std::string& scene_id) {
  AnnotationSchema canonical;
  canonical.delimiter = ',';
  return load_annotations(path, canonical, scene_id);
}

std::string export_metadata(const SceneDataset& d) {
  io::KvFile kv;
  kv.set("scene_id", d.scene_id);
  kv.set("x_min", io::format_double(d.bounds.x_min));
  kv.set("y_min", io::format_double(d.bounds.y_min));
  kv.set("x_max", io::format_double(d.bounds.x_max));
  kv.set("y_max", io::format_double(d.bounds.y_max));
  kv.set("fps", io::format_double(d.fps));
  kv.set("frame_stride", io::format_int(d.frame_stride));
  return kv.serialize();
}

void apply_metadata(SceneDataset& d, const io::KvFile& kv) {
  for (const auto& [key, value] : kv.entries()) {
    if (key == "scene_id") {
      d.scene_id = value;
    } else if (key == "x_min") {
      d.bounds.x_min = kv.get_double(key);
    } else if (key == "y_min") {
      d.bounds.y_min = kv.get_double(key);
    } else if (key == "x_max") {
      d.bounds.x_max = kv.get_double(key);
    } else if (key == "y_max") {
      d.bounds.y_max = kv.get_double(key);
    } else if (key == "fps") {
      d.fps = kv.get_double(key);
    } else if (key == "frame_stride") {
      d.frame_stride = kv.get_int(key);
    } else {
      throw ConfigError("scene metadata: unknown key '" + key + "'");
    }
  }
  if (!d.bounds.valid())
    throw DataError("scene metadata: bounds are empty or inverted");
  for (const TrackPoint& p : d.points)
    if (p.x < d.bounds.x_min || p.x > d.bounds.x_max ||
        p.y < d.bounds.y_min || p.y > d.bounds.y_max)
      throw DataError("point (" + io::format_double(p.x) + ", " +
                      io::format_double(p.y) +
                      ") lies outside the configured bounds");
}

Vec2 to_unit(Vec2 p, const Bounds& b) {
  if (!b.valid()) throw InvariantError("to_unit: invalid bounds");
  if (p.x < b.x_min || p.x > b.x_max || p.y < b.y_min || p.y > b.y_max)
    throw DataError("point (" + io::format_double(p.x) + ", " +
                    io::format_double(p.y) + ") is outside scene bounds");
  const double below_one = std::nextafter(1.0, 0.0);
  double u = (p.x - b.x_min) / b.width();
  double v = (p.y - b.y_min) / b.height();
  if (u >= 1.0) u = below_one;
  if (v >= 1.0) v = below_one;
  return {u, v};
}

Vec2 from_unit(Vec2 u, const Bounds& b) {
  if (!b.valid()) throw InvariantError("from_unit: invalid bounds");
  return {b.x_min + u.x * b.width(), b.y_min + u.y * b.height()};
}

Vec2 clamp_to_bounds(Vec2 p, const Bounds& b) {
  return {std::clamp(p.x, b.x_min, b.x_max), std::clamp(p.y, b.y_min, b.y_max)};
}

}  // namespace gridpath::data
