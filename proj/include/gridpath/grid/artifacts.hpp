#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/data/dataset.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/grid/grid.hpp"

namespace gridpath::grid {

enum class CellClass { Linear, NonLinear };

// True iff every interior point stays within theta_lin meters of the
// first-to-last chord; two-point segments are trivially linear.
bool is_linear_segment(const std::vector<Vec2>& points, double theta_lin);

// A cell is NonLinear as soon as one trajectory segment through it bends
// beyond theta_lin; untouched cells stay Linear.
std::vector<CellClass> classify_cells(const std::vector<data::Track>& tracks,
                                      const data::Bounds& bounds,
                                      const GridSpec& spec, double theta_lin);

// Ordered subgrid transitions of one within-cell segment, consecutive
// repeats collapsed.
std::vector<std::pair<int, int>> parse_subgrid_paths(
    const std::vector<int>& subgrid_occupancy);

// Per non-linear cell: distinct-pedestrian counts over directed subgrid
// edges, plus the derived common-edge and common-subgrid sets (count > p).
struct CommonPathTable {
  int p = 3;
  std::vector<std::map<std::pair<int, int>, int>> edge_counts;
  std::vector<std::set<std::pair<int, int>>> common_edges;
  std::vector<std::set<int>> common_subgrids;

  bool is_common_subgrid(int cell, int subgrid) const {
    return common_subgrids[static_cast<std::size_t>(cell)].count(subgrid) > 0;
  }
};

CommonPathTable mine_common_paths(const std::vector<data::Track>& tracks,
                                  const std::vector<CellClass>& classes,
                                  const data::Bounds& bounds,
                                  const GridSpec& spec, int p);

// Everything preprocessing produces for one scene, cacheable as JSON.
struct GridArtifacts {
  std::string scene_id;
  data::Bounds bounds;
  GridSpec spec;
  double theta_lin = 0.10;
  int p = 3;
  std::uint64_t config_fingerprint = 0;
  std::vector<CellClass> classes;
  CommonPathTable table;

  bool nonlinear(int cell) const {
    return classes[static_cast<std::size_t>(cell)] == CellClass::NonLinear;
  }

  // Write gate: scene memory accumulates only where trajectories bend.
  bool write_allowed(int cell) const { return nonlinear(cell); }

  // Read gate under the ablation's hard-filter flags; the full model passes
  // both flags (non-linear cell AND common subgrid).
  bool read_allowed(int cell, int subgrid, bool hf_grid,
                    bool hf_subgrid) const {
    if (hf_grid && !nonlinear(cell)) return false;
    if (hf_subgrid && !table.is_common_subgrid(cell, subgrid)) return false;
    return true;
  }
};

GridArtifacts build_artifacts(const std::vector<data::Track>& tracks,
                              const data::Bounds& bounds, const GridSpec& spec,
                              double theta_lin, int p,
                              const std::string& scene_id);

std::string artifacts_to_json(const GridArtifacts& a);
GridArtifacts artifacts_from_json(const std::string& text);

}  // namespace gridpath::grid
