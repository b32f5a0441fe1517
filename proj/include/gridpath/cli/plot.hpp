#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/grid/artifacts.hpp"

namespace gridpath::cli {

// One predicted trajectory keyed like its source window.
struct PredictedWindow {
  std::string scene_id;
  long long ped_id = 0;
  long long start_frame = 0;
  std::vector<Vec2> positions;  // t_pred predicted steps
};

// `# config <hex>` provenance comment, a `scene_id,ped_id,start_frame,step,
// x_m,y_m` header, then one row per predicted step (step numbered from 1).
std::string predictions_to_csv(const std::vector<PredictedWindow>& predictions,
                               std::uint64_t config_fingerprint);

// Inverse of predictions_to_csv; `#` comment lines are skipped. DataError on
// malformed rows or non-consecutive step numbers.
std::vector<PredictedWindow> predictions_from_csv(const std::string& text);

// Deterministic SVG of one window over the scene: bounds frame, cell grid
// lines, shaded non-linear cells, highlighted common subgrids, and three
// polylines -- observed (solid blue), ground-truth future (dashed), predicted
// (solid red). Point counts equal the segment lengths exactly.
std::string render_window_svg(const grid::GridArtifacts& artifacts,
                              const data::TrajectoryWindow& window, int t_obs,
                              const std::vector<Vec2>& predicted,
                              std::uint64_t config_fingerprint);

}  // namespace gridpath::cli
