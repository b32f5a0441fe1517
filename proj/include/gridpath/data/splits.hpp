#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridpath/data/dataset.hpp"
#include "gridpath/data/windows.hpp"

namespace gridpath::data {

// Window assignments for the two-stage protocol. Stage 1 pools every scene
// except the held-out one and splits 80/20 by window count; stage 2 takes the
// first `stage2_fraction` of the held-out scene's frame span for training and
// the rest for testing, dropping windows that straddle the boundary.
struct Splits {
  std::vector<TrajectoryWindow> stage1_train;
  std::vector<TrajectoryWindow> stage1_val;
  std::vector<TrajectoryWindow> stage2_train;
  std::vector<TrajectoryWindow> test;
  long long stage2_boundary_frame = 0;  // first Test-eligible frame
};

Splits make_splits(const std::vector<SceneDataset>& datasets,
                   const std::string& held_out_scene, double stage2_fraction,
                   const WindowParams& wp, std::uint64_t seed);

}  // namespace gridpath::data
