#include "gridpath/cli/plot.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gridpath/io/format.hpp"

namespace gridpath::cli {

namespace {

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string predictions_to_csv(const std::vector<PredictedWindow>& predictions,
                               std::uint64_t config_fingerprint) {
  std::string out = "# config " + hex64(config_fingerprint) + "\n";
  out += "scene_id,ped_id,start_frame,step,x_m,y_m\n";
  for (const PredictedWindow& p : predictions) {
    for (std::size_t i = 0; i < p.positions.size(); ++i) {
      out += p.scene_id;
      out += ',';
      out += io::format_int(p.ped_id);
      out += ',';
      out += io::format_int(p.start_frame);
      out += ',';
      out += io::format_int(static_cast<long long>(i + 1));
      out += ',';
      out += io::format_double(p.positions[i].x);
      out += ',';
      out += io::format_double(p.positions[i].y);
      out += '\n';
    }
  }
  return out;
}

std::vector<PredictedWindow> predictions_from_csv(const std::string& text) {
  std::vector<PredictedWindow> out;
  std::istringstream in(text);
  std::string line;
  long long lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "predictions line " + std::to_string(lineno);
    if (!saw_header) {
      if (line != "scene_id,ped_id,start_frame,step,x_m,y_m")
        throw DataError(where + ": unexpected header '" + line + "'");
      saw_header = true;
      continue;
    }
    const auto cols = split_csv_row(line);
    if (cols.size() != 6)
      throw DataError(where + ": expected 6 columns, got " +
                      std::to_string(cols.size()));
    const long long ped = io::parse_int(cols[1], where + " ped_id");
    const long long start = io::parse_int(cols[2], where + " start_frame");
    const long long step = io::parse_int(cols[3], where + " step");
    const Vec2 pos{io::parse_double(cols[4], where + " x_m"),
                   io::parse_double(cols[5], where + " y_m")};
    const bool fresh = out.empty() || out.back().scene_id != cols[0] ||
                       out.back().ped_id != ped ||
                       out.back().start_frame != start;
    if (fresh) {
      if (step != 1)
        throw DataError(where + ": window must start at step 1, got " +
                        std::to_string(step));
      out.push_back({cols[0], ped, start, {pos}});
    } else {
      const long long expected =
          static_cast<long long>(out.back().positions.size()) + 1;
      if (step != expected)
        throw DataError(where + ": expected step " + std::to_string(expected) +
                        ", got " + std::to_string(step));
      out.back().positions.push_back(pos);
    }
  }
  if (!saw_header) throw DataError("predictions: missing header row");
  return out;
}

namespace {

constexpr double kPxPerMeter = 40.0;
constexpr double kMarginPx = 24.0;

struct Mapper {
  const data::Bounds& b;
  double sx(double x) const { return kMarginPx + (x - b.x_min) * kPxPerMeter; }
  double sy(double y) const { return kMarginPx + (b.y_max - y) * kPxPerMeter; }
};

std::string fmt(double v) { return io::format_double(v); }

void append_rect(std::string& svg, double x, double y, double w, double h,
                 const std::string& attrs) {
  svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
         "\" height=\"" + fmt(h) + "\" " + attrs + "/>\n";
}

void append_line(std::string& svg, double x1, double y1, double x2, double y2,
                 const std::string& attrs) {
  svg += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" +
         fmt(x2) + "\" y2=\"" + fmt(y2) + "\" " + attrs + "/>\n";
}

void append_polyline(std::string& svg, const Mapper& map,
                     const std::vector<Vec2>& pts, const std::string& cls,
                     const std::string& attrs) {
  svg += "<polyline class=\"" + cls + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) svg += ' ';
    svg += fmt(map.sx(pts[i].x)) + "," + fmt(map.sy(pts[i].y));
  }
  svg += "\" fill=\"none\" " + attrs + "/>\n";
}

}  // namespace

std::string render_window_svg(const grid::GridArtifacts& artifacts,
                              const data::TrajectoryWindow& window, int t_obs,
                              const std::vector<Vec2>& predicted,
                              std::uint64_t config_fingerprint) {
  if (t_obs < 1 || static_cast<std::size_t>(t_obs) >= window.positions.size())
    throw InvariantError("plot: t_obs outside the window");
  const data::Bounds& b = artifacts.bounds;
  const Mapper map{b};
  const double width = b.width() * kPxPerMeter + 2.0 * kMarginPx;
  const double height = b.height() * kPxPerMeter + 2.0 * kMarginPx;
  const int n = artifacts.spec.n;
  const int m = artifacts.spec.m;
  const double cell_w = b.width() / n;
  const double cell_h = b.height() / n;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) +
         " " + fmt(height) + "\">\n";
  svg += "<!-- config " + hex64(config_fingerprint) + " -->\n";
  append_rect(svg, 0, 0, width, height, "fill=\"#ffffff\"");

  // Shaded non-linear cells, then their common subgrids on top.
  for (int cell = 0; cell < artifacts.spec.cell_count(); ++cell) {
    if (!artifacts.nonlinear(cell)) continue;
    const int row = cell / n;
    const int col = cell % n;
    const double x0 = b.x_min + col * cell_w;
    const double y1 = b.y_min + (row + 1) * cell_h;  // cell's top edge
    append_rect(svg, map.sx(x0), map.sy(y1), cell_w * kPxPerMeter,
                cell_h * kPxPerMeter, "class=\"nonlinear\" fill=\"#fbe3e4\"");
    for (int sg : artifacts.table.common_subgrids[static_cast<std::size_t>(
             cell)]) {
      const int srow = sg / m;
      const int scol = sg % m;
      const double sx0 = x0 + scol * cell_w / m;
      const double sy1 = b.y_min + row * cell_h + (srow + 1) * cell_h / m;
      append_rect(svg, map.sx(sx0), map.sy(sy1), cell_w / m * kPxPerMeter,
                  cell_h / m * kPxPerMeter,
                  "class=\"common\" fill=\"#f5b5b8\"");
    }
  }

  // Cell grid lines and the scene frame.
  for (int i = 0; i <= n; ++i) {
    const double x = b.x_min + i * cell_w;
    append_line(svg, map.sx(x), map.sy(b.y_min), map.sx(x), map.sy(b.y_max),
                "stroke=\"#d4d4d8\" stroke-width=\"1\"");
    const double y = b.y_min + i * cell_h;
    append_line(svg, map.sx(b.x_min), map.sy(y), map.sx(b.x_max), map.sy(y),
                "stroke=\"#d4d4d8\" stroke-width=\"1\"");
  }
  append_rect(svg, map.sx(b.x_min), map.sy(b.y_max), b.width() * kPxPerMeter,
              b.height() * kPxPerMeter,
              "fill=\"none\" stroke=\"#52525b\" stroke-width=\"1.5\"");

  const std::vector<Vec2> observed(window.positions.begin(),
                                   window.positions.begin() + t_obs);
  const std::vector<Vec2> truth(window.positions.begin() + t_obs,
                                window.positions.end());
  append_polyline(svg, map, observed, "observed",
                  "stroke=\"#1d4ed8\" stroke-width=\"2\"");
  append_polyline(svg, map, truth, "truth",
                  "stroke=\"#3f3f46\" stroke-width=\"2\" "
                  "stroke-dasharray=\"6 4\"");
  append_polyline(svg, map, predicted, "predicted",
                  "stroke=\"#dc2626\" stroke-width=\"2\"");
  // Mark where observation starts so walking direction is readable.
  svg += "<circle cx=\"" + fmt(map.sx(observed.front().x)) + "\" cy=\"" +
         fmt(map.sy(observed.front().y)) +
         "\" r=\"3.5\" fill=\"#1d4ed8\"/>\n";

  svg += "<text x=\"" + fmt(kMarginPx) + "\" y=\"" + fmt(kMarginPx - 8.0) +
         "\" font-family=\"monospace\" font-size=\"12\">" + window.scene_id +
         " ped " + io::format_int(window.ped_id) + " frame " +
         io::format_int(window.start_frame) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace gridpath::cli
