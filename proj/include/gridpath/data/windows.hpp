#pragma once

#include <string>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/data/dataset.hpp"

namespace gridpath::data {

struct WindowParams {
  int t_obs = 8;
  int t_pred = 12;
  int stride = 1;  // window start stride, in annotated steps

  int length() const { return t_obs + t_pred; }
};

struct TrajectoryWindow {
  std::string scene_id;
  long long ped_id = 0;
  long long start_frame = 0;
  std::vector<Vec2> positions;  // t_obs + t_pred points, meters
};

// Every run of >= t_obs+t_pred consecutively annotated frames (gap exactly
// frame_stride) yields windows at the given start stride. Output ordered by
// (ped_id, start_frame).
std::vector<TrajectoryWindow> extract_windows(const SceneDataset& d,
                                              const WindowParams& wp = {});

// Displacements position_t - position_{t-1}, t = 1..len-1.
std::vector<Vec2> to_relative(const TrajectoryWindow& w);

// Cumulative-sum inverse of to_relative.
std::vector<Vec2> positions_from_relative(Vec2 start,
                                          const std::vector<Vec2>& rel);

// One pedestrian's maximal consecutively-annotated run, any length.
struct Track {
  long long ped_id = 0;
  std::vector<Vec2> points;
};

// All maximal runs restricted to frames in [frame_lo, frame_hi]; feeds grid
// classification and common-path mining over training-range data.
std::vector<Track> collect_tracks(const SceneDataset& d, long long frame_lo,
                                  long long frame_hi);

}  // namespace gridpath::data
