#include "gridpath/grid/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <json.hpp>

#include "gridpath/io/format.hpp"

namespace gridpath::grid {

namespace {

using ordered_json = nlohmann::ordered_json;

struct CellRun {
  int cell = 0;
  std::vector<Vec2> points;
  std::vector<int> subgrids;
};

// Maximal runs of consecutive track points sharing a grid cell, with the
// subgrid id of every point alongside.
std::vector<CellRun> split_cell_runs(const data::Track& track,
                                     const data::Bounds& bounds,
                                     const GridSpec& spec) {
  std::vector<CellRun> runs;
  for (const Vec2& p : track.points) {
    const Located loc = locate(data::to_unit(p, bounds), spec);
    if (runs.empty() || runs.back().cell != loc.cell) {
      CellRun run;
      run.cell = loc.cell;
      runs.push_back(std::move(run));
    }
    runs.back().points.push_back(p);
    runs.back().subgrids.push_back(loc.subgrid);
  }
  return runs;
}

void derive_common_sets(CommonPathTable& table) {
  const std::size_t cells = table.edge_counts.size();
  table.common_edges.assign(cells, {});
  table.common_subgrids.assign(cells, {});
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (const auto& [edge, count] : table.edge_counts[cell]) {
      if (count > table.p) {
        table.common_edges[cell].insert(edge);
        table.common_subgrids[cell].insert(edge.first);
        table.common_subgrids[cell].insert(edge.second);
      }
    }
  }
}

std::uint64_t fingerprint_config(const GridArtifacts& a) {
  std::string s;
  s += "scene_id=" + a.scene_id + "\n";
  s += "n=" + io::format_int(a.spec.n) + "\n";
  s += "m=" + io::format_int(a.spec.m) + "\n";
  s += "theta_lin=" + io::format_double(a.theta_lin) + "\n";
  s += "p=" + io::format_int(a.p) + "\n";
  s += "x_min=" + io::format_double(a.bounds.x_min) + "\n";
  s += "y_min=" + io::format_double(a.bounds.y_min) + "\n";
  s += "x_max=" + io::format_double(a.bounds.x_max) + "\n";
  s += "y_max=" + io::format_double(a.bounds.y_max) + "\n";
  return fnv1a64(s);
}

constexpr const char* kFormat = "gridpath.grid_artifacts";
constexpr int kVersion = 1;

}  // namespace

bool is_linear_segment(const std::vector<Vec2>& points, double theta_lin) {
  if (points.size() < 2)
    throw InvariantError("is_linear_segment: need at least two points");
  const Vec2 a = points.front();
  const Vec2 b = points.back();
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double chord = std::hypot(dx, dy);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const Vec2 q = points[i];
    // Degenerate chord (loop back to the start): fall back to distance from
    // the shared endpoint.
    const double dev = chord == 0.0
                           ? std::hypot(q.x - a.x, q.y - a.y)
                           : std::abs(dx * (q.y - a.y) - dy * (q.x - a.x)) /
                                 chord;
    worst = std::max(worst, dev);
  }
  return worst <= theta_lin;
}

std::vector<CellClass> classify_cells(const std::vector<data::Track>& tracks,
                                      const data::Bounds& bounds,
                                      const GridSpec& spec, double theta_lin) {
  spec.validate();
  if (!(theta_lin >= 0.0))
    throw ConfigError("classify_cells: theta_lin must be non-negative");
  if (!bounds.valid())
    throw InvariantError("classify_cells: bounds must be valid");
  std::vector<CellClass> classes(static_cast<std::size_t>(spec.cell_count()),
                                 CellClass::Linear);
  for (const data::Track& track : tracks) {
    for (const CellRun& run : split_cell_runs(track, bounds, spec)) {
      if (run.points.size() < 2) continue;
      if (!is_linear_segment(run.points, theta_lin))
        classes[static_cast<std::size_t>(run.cell)] = CellClass::NonLinear;
    }
  }
  return classes;
}

std::vector<std::pair<int, int>> parse_subgrid_paths(
    const std::vector<int>& subgrid_occupancy) {
  std::vector<int> collapsed;
  for (int s : subgrid_occupancy) {
    if (collapsed.empty() || collapsed.back() != s) collapsed.push_back(s);
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 1; i < collapsed.size(); ++i)
    edges.emplace_back(collapsed[i - 1], collapsed[i]);
  return edges;
}

CommonPathTable mine_common_paths(const std::vector<data::Track>& tracks,
                                  const std::vector<CellClass>& classes,
                                  const data::Bounds& bounds,
                                  const GridSpec& spec, int p) {
  spec.validate();
  if (p < 0) throw ConfigError("mine_common_paths: p must be non-negative");
  if (classes.size() != static_cast<std::size_t>(spec.cell_count()))
    throw InvariantError("mine_common_paths: classes size mismatch");
  if (!bounds.valid())
    throw InvariantError("mine_common_paths: bounds must be valid");

  // Each pedestrian contributes at most once per directed edge per cell, no
  // matter how many times they traverse it.
  std::vector<std::map<std::pair<int, int>, std::set<long long>>> visitors(
      static_cast<std::size_t>(spec.cell_count()));
  for (const data::Track& track : tracks) {
    for (const CellRun& run : split_cell_runs(track, bounds, spec)) {
      if (classes[static_cast<std::size_t>(run.cell)] != CellClass::NonLinear)
        continue;
      for (const auto& edge : parse_subgrid_paths(run.subgrids))
        visitors[static_cast<std::size_t>(run.cell)][edge].insert(
            track.ped_id);
    }
  }

  CommonPathTable table;
  table.p = p;
  table.edge_counts.resize(visitors.size());
  for (std::size_t cell = 0; cell < visitors.size(); ++cell) {
    for (const auto& [edge, peds] : visitors[cell])
      table.edge_counts[cell][edge] = static_cast<int>(peds.size());
  }
  derive_common_sets(table);
  return table;
}

GridArtifacts build_artifacts(const std::vector<data::Track>& tracks,
                              const data::Bounds& bounds, const GridSpec& spec,
                              double theta_lin, int p,
                              const std::string& scene_id) {
  GridArtifacts a;
  a.scene_id = scene_id;
  a.bounds = bounds;
  a.spec = spec;
  a.theta_lin = theta_lin;
  a.p = p;
  a.classes = classify_cells(tracks, bounds, spec, theta_lin);
  a.table = mine_common_paths(tracks, a.classes, bounds, spec, p);
  a.config_fingerprint = fingerprint_config(a);
  return a;
}

std::string artifacts_to_json(const GridArtifacts& a) {
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["scene_id"] = a.scene_id;
  j["bounds"] = {{"x_min", a.bounds.x_min},
                 {"y_min", a.bounds.y_min},
                 {"x_max", a.bounds.x_max},
                 {"y_max", a.bounds.y_max}};
  j["grid"] = {{"n", a.spec.n}, {"m", a.spec.m}};
  j["theta_lin"] = a.theta_lin;
  j["p"] = a.p;
  j["config_fingerprint"] = a.config_fingerprint;

  std::string classes(a.classes.size(), 'L');
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    if (a.classes[i] == CellClass::NonLinear) classes[i] = 'N';
  }
  j["classes"] = classes;

  ordered_json cells = ordered_json::array();
  for (const auto& edges : a.table.edge_counts) {
    ordered_json rows = ordered_json::array();
    for (const auto& [edge, count] : edges)
      rows.push_back({edge.first, edge.second, count});
    cells.push_back(std::move(rows));
  }
  j["edge_counts"] = std::move(cells);
  return j.dump(2) + "\n";
}

GridArtifacts artifacts_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("grid artifacts: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw DataError("grid artifacts: unrecognized format field");
    if (j.at("version").get<int>() != kVersion)
      throw DataError("grid artifacts: unsupported version");

    GridArtifacts a;
    a.scene_id = j.at("scene_id").get<std::string>();
    const auto& jb = j.at("bounds");
    a.bounds.x_min = jb.at("x_min").get<double>();
    a.bounds.y_min = jb.at("y_min").get<double>();
    a.bounds.x_max = jb.at("x_max").get<double>();
    a.bounds.y_max = jb.at("y_max").get<double>();
    const auto& jg = j.at("grid");
    a.spec.n = jg.at("n").get<int>();
    a.spec.m = jg.at("m").get<int>();
    a.spec.validate();
    a.theta_lin = j.at("theta_lin").get<double>();
    a.p = j.at("p").get<int>();
    a.config_fingerprint = j.at("config_fingerprint").get<std::uint64_t>();

    const std::string classes = j.at("classes").get<std::string>();
    if (classes.size() != static_cast<std::size_t>(a.spec.cell_count()))
      throw DataError("grid artifacts: classes length mismatch");
    a.classes.reserve(classes.size());
    for (char ch : classes) {
      if (ch != 'L' && ch != 'N')
        throw DataError("grid artifacts: classes must contain only L or N");
      a.classes.push_back(ch == 'N' ? CellClass::NonLinear
                                    : CellClass::Linear);
    }

    const auto& jc = j.at("edge_counts");
    if (jc.size() != static_cast<std::size_t>(a.spec.cell_count()))
      throw DataError("grid artifacts: edge_counts length mismatch");
    a.table.p = a.p;
    a.table.edge_counts.resize(jc.size());
    const int max_subgrid = a.spec.subgrid_count();
    for (std::size_t cell = 0; cell < jc.size(); ++cell) {
      for (const auto& row : jc[cell]) {
        if (row.size() != 3)
          throw DataError("grid artifacts: edge rows must be [from, to, n]");
        const int from = row[0].get<int>();
        const int to = row[1].get<int>();
        const int count = row[2].get<int>();
        if (from < 0 || from >= max_subgrid || to < 0 || to >= max_subgrid)
          throw DataError("grid artifacts: subgrid id out of range");
        if (from == to || count < 1)
          throw DataError("grid artifacts: malformed edge row");
        if (!a.table.edge_counts[cell].emplace(std::make_pair(from, to), count)
                 .second)
          throw DataError("grid artifacts: duplicate edge row");
      }
    }
    derive_common_sets(a.table);

    if (fingerprint_config(a) != a.config_fingerprint)
      throw DataError("grid artifacts: config fingerprint mismatch");
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("grid artifacts: malformed document: ") +
                    e.what());
  }
}

}  // namespace gridpath::grid
