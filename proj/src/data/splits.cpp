#include "gridpath/data/splits.hpp"

#include <algorithm>
#include <cmath>

#include "gridpath/nn/rng.hpp"

namespace gridpath::data {

namespace {

bool window_before(const TrajectoryWindow& a, const TrajectoryWindow& b) {
  if (a.scene_id != b.scene_id) return a.scene_id < b.scene_id;
  if (a.ped_id != b.ped_id) return a.ped_id < b.ped_id;
  return a.start_frame < b.start_frame;
}

}  // namespace

Splits make_splits(const std::vector<SceneDataset>& datasets,
                   const std::string& held_out_scene, double stage2_fraction,
                   const WindowParams& wp, std::uint64_t seed) {
  if (datasets.size() < 2)
    throw ConfigError("make_splits: leave-one-out needs at least 2 scenes");
  if (!(stage2_fraction >= 0.0 && stage2_fraction <= 1.0))
    throw ConfigError("make_splits: stage2_fraction must lie in [0, 1]");

  const SceneDataset* held = nullptr;
  std::vector<const SceneDataset*> others;
  for (const SceneDataset& d : datasets) {
    if (d.scene_id == held_out_scene)
      held = &d;
    else
      others.push_back(&d);
  }
  if (held == nullptr)
    throw ConfigError("make_splits: held-out scene '" + held_out_scene +
                      "' is not among the datasets");
  std::sort(others.begin(), others.end(),
            [](const SceneDataset* a, const SceneDataset* b) {
              return a->scene_id < b->scene_id;
            });

  Splits s;

  // Stage 1: pooled windows from the remaining scenes, 80/20 by count.
  std::vector<TrajectoryWindow> pool;
  for (const SceneDataset* d : others) {
    std::vector<TrajectoryWindow> ws = extract_windows(*d, wp);
    pool.insert(pool.end(), std::make_move_iterator(ws.begin()),
                std::make_move_iterator(ws.end()));
  }
  nn::RngStream shuffle_rng(seed, "split");
  for (std::size_t i = pool.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(
        shuffle_rng.uniform_int(0, static_cast<long>(i - 1)));
    std::swap(pool[i - 1], pool[j]);
  }
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(0.8 * static_cast<double>(pool.size())));
  s.stage1_train.assign(pool.begin(),
                        pool.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.stage1_val.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train),
                      pool.end());
  std::sort(s.stage1_train.begin(), s.stage1_train.end(), window_before);
  std::sort(s.stage1_val.begin(), s.stage1_val.end(), window_before);

  // Stage 2 / Test: frame-range split of the held-out scene.
  std::vector<TrajectoryWindow> held_windows = extract_windows(*held, wp);
  if (!held->points.empty()) {
    const long long f_min = held->points.front().frame;
    const long long f_max = held->points.back().frame;
    const long long span = f_max - f_min + 1;
    const long long boundary =
        f_min + static_cast<long long>(
                    std::floor(stage2_fraction * static_cast<double>(span)));
    s.stage2_boundary_frame = boundary;
    const long long window_extent =
        static_cast<long long>(wp.length() - 1) * held->frame_stride;
    for (TrajectoryWindow& w : held_windows) {
      const long long end_frame = w.start_frame + window_extent;
      if (end_frame < boundary)
        s.stage2_train.push_back(std::move(w));
      else if (w.start_frame >= boundary)
        s.test.push_back(std::move(w));
      // straddling windows are dropped from both sides
    }
    std::sort(s.stage2_train.begin(), s.stage2_train.end(), window_before);
    std::sort(s.test.begin(), s.test.end(), window_before);
  }
  return s;
}

}  // namespace gridpath::data
