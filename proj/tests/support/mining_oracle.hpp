#pragma once

// Brute-force reference for common-path mining, plus the instance family the
// mining acceptance check enumerates. An instance fixes the grid, the cell
// classes, the threshold p, and each pedestrian's intended (cell, subgrid)
// stop sequence; tracks are realized at subgrid centers so cell assignment
// is unambiguous.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridpath/data/windows.hpp"
#include "gridpath/grid/artifacts.hpp"
#include "gridpath/grid/grid.hpp"
#include "gridpath/nn/rng.hpp"

namespace testutil {

struct PlannedTrack {
  long long ped_id = 0;
  std::vector<std::pair<int, int>> stops;  // (cell, subgrid)
};

struct MiningInstance {
  gridpath::grid::GridSpec spec;
  std::vector<gridpath::grid::CellClass> classes;
  int p = 3;
  std::vector<PlannedTrack> peds;
};

inline gridpath::Vec2 subgrid_center(int cell, int subgrid,
                                     const gridpath::grid::GridSpec& spec) {
  const int row = cell / spec.n;
  const int col = cell % spec.n;
  const int srow = subgrid / spec.m;
  const int scol = subgrid % spec.m;
  return {(col + (scol + 0.5) / spec.m) / spec.n,
          (row + (srow + 0.5) / spec.m) / spec.n};
}

inline std::vector<gridpath::data::Track> realize_tracks(
    const MiningInstance& ins) {
  std::vector<gridpath::data::Track> tracks;
  tracks.reserve(ins.peds.size());
  for (const PlannedTrack& ped : ins.peds) {
    gridpath::data::Track t;
    t.ped_id = ped.ped_id;
    for (const auto& [cell, sub] : ped.stops)
      t.points.push_back(subgrid_center(cell, sub, ins.spec));
    tracks.push_back(std::move(t));
  }
  return tracks;
}

// Instances are realized in the unit square directly.
inline gridpath::data::Bounds unit_bounds() { return {0.0, 0.0, 1.0, 1.0}; }

// Independent recount straight off the planned stops: a directed edge is any
// adjacent stop pair in the same non-linear cell with different subgrids,
// and each pedestrian counts once per edge.
inline gridpath::grid::CommonPathTable brute_force_mine(
    const MiningInstance& ins) {
  using gridpath::grid::CellClass;
  const auto cells = static_cast<std::size_t>(ins.spec.cell_count());
  std::vector<std::map<std::pair<int, int>, std::set<long long>>> seen(cells);
  for (const PlannedTrack& ped : ins.peds) {
    for (std::size_t i = 1; i < ped.stops.size(); ++i) {
      const auto [c0, s0] = ped.stops[i - 1];
      const auto [c1, s1] = ped.stops[i];
      if (c0 != c1 || s0 == s1) continue;
      if (ins.classes[static_cast<std::size_t>(c1)] != CellClass::NonLinear)
        continue;
      seen[static_cast<std::size_t>(c1)][{s0, s1}].insert(ped.ped_id);
    }
  }
  gridpath::grid::CommonPathTable table;
  table.p = ins.p;
  table.edge_counts.resize(cells);
  table.common_edges.assign(cells, {});
  table.common_subgrids.assign(cells, {});
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (const auto& [edge, peds] : seen[cell]) {
      const int count = static_cast<int>(peds.size());
      table.edge_counts[cell][edge] = count;
      if (count > ins.p) {
        table.common_edges[cell].insert(edge);
        table.common_subgrids[cell].insert(edge.first);
        table.common_subgrids[cell].insert(edge.second);
      }
    }
  }
  return table;
}

inline bool tables_equal(const gridpath::grid::CommonPathTable& a,
                         const gridpath::grid::CommonPathTable& b) {
  return a.p == b.p && a.edge_counts == b.edge_counts &&
         a.common_edges == b.common_edges &&
         a.common_subgrids == b.common_subgrids;
}

// True when the real miner agrees with the brute-force recount.
inline bool mining_matches(const MiningInstance& ins) {
  const auto mined = gridpath::grid::mine_common_paths(
      realize_tracks(ins), ins.classes, unit_bounds(), ins.spec, ins.p);
  return tables_equal(mined, brute_force_mine(ins));
}

// Random small instance on a 2x2 grid of 2x2 subgrids: up to 6 pedestrians,
// up to 12 stops each, random classes and threshold.
inline MiningInstance random_mining_instance(std::uint64_t seed) {
  using gridpath::grid::CellClass;
  gridpath::nn::RngStream rng(seed);
  MiningInstance ins;
  ins.spec.n = 2;
  ins.spec.m = 2;
  const long cells = ins.spec.cell_count();
  const long subs = ins.spec.subgrid_count();
  ins.classes.resize(static_cast<std::size_t>(cells));
  for (auto& c : ins.classes)
    c = rng.uniform_int(0, 1) == 1 ? CellClass::NonLinear : CellClass::Linear;
  ins.p = static_cast<int>(rng.uniform_int(0, 5));
  const long ped_count = rng.uniform_int(1, 6);
  for (long j = 0; j < ped_count; ++j) {
    PlannedTrack ped;
    ped.ped_id = j + 1;
    const long len = rng.uniform_int(1, 12);
    for (long k = 0; k < len; ++k)
      ped.stops.emplace_back(static_cast<int>(rng.uniform_int(0, cells - 1)),
                             static_cast<int>(rng.uniform_int(0, subs - 1)));
    ins.peds.push_back(std::move(ped));
  }
  return ins;
}

// Exhaustive single-edge family on one non-linear cell with m = 2: each of
// the 6 pedestrians either idles or traverses one of the 12 directed subgrid
// edges, covering every per-edge distinct-pedestrian count combination.
// Calls visit(instance) for all 13^6 assignments; returns how many were
// visited.
template <typename Visit>
inline std::uint64_t enumerate_single_edge_instances(int p, Visit visit) {
  using gridpath::grid::CellClass;
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) edges.emplace_back(a, b);

  MiningInstance ins;
  ins.spec.n = 1;
  ins.spec.m = 2;
  ins.classes = {CellClass::NonLinear};
  ins.p = p;
  ins.peds.resize(6);
  for (int j = 0; j < 6; ++j) ins.peds[static_cast<std::size_t>(j)].ped_id = j + 1;

  const int options = static_cast<int>(edges.size()) + 1;  // + idle
  std::vector<int> digits(6, 0);
  std::uint64_t visited = 0;
  while (true) {
    for (int j = 0; j < 6; ++j) {
      auto& stops = ins.peds[static_cast<std::size_t>(j)].stops;
      stops.clear();
      const int choice = digits[static_cast<std::size_t>(j)];
      if (choice == 0) {
        stops.emplace_back(0, 0);  // idle: single stop, no edge
      } else {
        const auto& e = edges[static_cast<std::size_t>(choice - 1)];
        stops.emplace_back(0, e.first);
        stops.emplace_back(0, e.second);
      }
    }
    visit(ins);
    ++visited;
    int pos = 0;
    while (pos < 6 && ++digits[static_cast<std::size_t>(pos)] == options) {
      digits[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == 6) break;
  }
  return visited;
}

}  // namespace testutil
