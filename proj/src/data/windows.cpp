#include "gridpath/data/windows.hpp"

#include <algorithm>
#include <map>

namespace gridpath::data {

std::vector<TrajectoryWindow> extract_windows(const SceneDataset& d,
                                              const WindowParams& wp) {
  if (wp.t_obs < 1 || wp.t_pred < 1 || wp.stride < 1)
    throw InvariantError("extract_windows: window parameters must be >= 1");

  std::map<long long, std::vector<TrackPoint>> by_ped;
  for (const TrackPoint& p : d.points) by_ped[p.ped_id].push_back(p);

  const int len = wp.length();
  std::vector<TrajectoryWindow> out;
  for (auto& [ped_id, pts] : by_ped) {
    std::sort(pts.begin(), pts.end(),
              [](const TrackPoint& a, const TrackPoint& b) {
                return a.frame < b.frame;
              });
    // maximal runs where consecutive frames differ by exactly frame_stride
    std::size_t run_begin = 0;
    for (std::size_t i = 1; i <= pts.size(); ++i) {
      const bool breaks =
          i == pts.size() ||
          pts[i].frame - pts[i - 1].frame != d.frame_stride;
      if (!breaks) continue;
      const std::size_t run_len = i - run_begin;
      if (run_len >= static_cast<std::size_t>(len)) {
        for (std::size_t s = 0; s + len <= run_len;
             s += static_cast<std::size_t>(wp.stride)) {
          TrajectoryWindow w;
          w.scene_id = d.scene_id;
          w.ped_id = ped_id;
          w.start_frame = pts[run_begin + s].frame;
          w.positions.reserve(len);
          for (int k = 0; k < len; ++k) {
            const TrackPoint& p = pts[run_begin + s + k];
            w.positions.push_back({p.x, p.y});
          }
          out.push_back(std::move(w));
        }
      }
      run_begin = i;
    }
  }
  return out;  // by_ped is ordered, starts ascend within each pedestrian
}

std::vector<Track> collect_tracks(const SceneDataset& d, long long frame_lo,
                                  long long frame_hi) {
  std::map<long long, std::vector<TrackPoint>> by_ped;
  for (const TrackPoint& p : d.points)
    if (p.frame >= frame_lo && p.frame <= frame_hi)
      by_ped[p.ped_id].push_back(p);

  std::vector<Track> out;
  for (auto& [ped_id, pts] : by_ped) {
    std::sort(pts.begin(), pts.end(),
              [](const TrackPoint& a, const TrackPoint& b) {
                return a.frame < b.frame;
              });
    Track cur;
    cur.ped_id = ped_id;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!cur.points.empty() &&
          pts[i].frame - pts[i - 1].frame != d.frame_stride) {
        out.push_back(std::move(cur));
        cur = Track{};
        cur.ped_id = ped_id;
      }
      cur.points.push_back({pts[i].x, pts[i].y});
    }
    if (!cur.points.empty()) out.push_back(std::move(cur));
  }
  return out;
}

std::vector<Vec2> to_relative(const TrajectoryWindow& w) {
  if (w.positions.size() < 2)
    throw InvariantError("to_relative: window too short");
  std::vector<Vec2> rel;
  rel.reserve(w.positions.size() - 1);
  for (std::size_t t = 1; t < w.positions.size(); ++t)
    rel.push_back(w.positions[t] - w.positions[t - 1]);
  return rel;
}

std::vector<Vec2> positions_from_relative(Vec2 start,
                                          const std::vector<Vec2>& rel) {
  std::vector<Vec2> out;
  out.reserve(rel.size() + 1);
  out.push_back(start);
  Vec2 cur = start;
  for (const Vec2& d : rel) {
    cur = cur + d;
    out.push_back(cur);
  }
  return out;
}

}  // namespace gridpath::data
