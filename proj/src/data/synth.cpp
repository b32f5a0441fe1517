#include "gridpath/data/synth.hpp"

#include <algorithm>
#include <cmath>

#include "gridpath/nn/rng.hpp"

namespace gridpath::data {

namespace {

constexpr double kWidth = 16.0;
constexpr double kHeight = 12.0;
constexpr double kMargin = 0.6;
// Strictly inside a grid cell for every cell count used (2, 4, 5, 8, 16
// per axis): a junction on a cell boundary would split the turn's corner
// across cells and hide the non-linearity from per-cell classification.
constexpr double kJunctionX = 8.4;
constexpr double kJunctionY = 6.3;
constexpr int kTrackLen = 20;
constexpr int kMinTurnStep = 3;
constexpr int kMaxTurnStep = 17;

void validate(const SynthSceneSpec& spec) {
  if (spec.ped_count < 1)
    throw ConfigError("synth: ped_count must be at least 1");
  if (!(spec.noise_sigma >= 0.0))
    throw ConfigError("synth: noise sigma must be non-negative");
  if (!(spec.speed_min > 0.0) || spec.speed_max < spec.speed_min)
    throw ConfigError("synth: need 0 < speed_min <= speed_max");
  if (spec.branch_left < 0.0 || spec.branch_right < 0.0 ||
      std::fabs(spec.branch_left + spec.branch_right - 1.0) > 1e-9)
    throw ConfigError("synth: branch probabilities must sum to 1");

  const double reach = (kTrackLen - 1) * spec.speed_max;
  switch (spec.layout) {
    case SynthLayout::Straight:
      if (reach + 2.0 * kMargin > kHeight)
        throw ConfigError("synth: speed_max too large for straight tracks");
      break;
    case SynthLayout::TJunction:
      if (kMaxTurnStep * spec.speed_max > kJunctionY - kMargin)
        throw ConfigError("synth: speed_max too large for the corridor");
      if ((kTrackLen - 1 - kMinTurnStep) * spec.speed_max >
          kJunctionX - 1.0)
        throw ConfigError("synth: speed_max too large for the branch arms");
      break;
    case SynthLayout::Door:
      break;  // geometry bounded by construction
  }
}

}  // namespace

SynthLayout parse_layout(const std::string& name) {
  if (name == "straight") return SynthLayout::Straight;
  if (name == "tjunction" || name == "t-junction") return SynthLayout::TJunction;
  if (name == "door") return SynthLayout::Door;
  throw ConfigError("synth: unknown layout '" + name + "'");
}

SceneDataset synth_generate(const SynthSceneSpec& spec) {
  validate(spec);

  SceneDataset d;
  d.scene_id = spec.scene_id;
  d.bounds = {0.0, 0.0, kWidth, kHeight};
  d.frame_stride = 1;
  d.fps = 2.5;

  nn::RngStream rng(spec.seed, "synth");
  for (int j = 0; j < spec.ped_count; ++j) {
    std::vector<Vec2> ideal(kTrackLen);
    switch (spec.layout) {
      case SynthLayout::Straight: {
        const double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double speed = rng.uniform(spec.speed_min, spec.speed_max);
        const bool horizontal = (j % 2 == 0);
        const double cross_extent = horizontal ? kHeight : kWidth;
        const double along_extent = horizontal ? kWidth : kHeight;
        const double cross = rng.uniform(kMargin, cross_extent - kMargin);
        const double reach = (kTrackLen - 1) * speed;
        const double a0 =
            dir > 0.0
                ? rng.uniform(kMargin, along_extent - kMargin - reach)
                : rng.uniform(kMargin + reach, along_extent - kMargin);
        for (int t = 0; t < kTrackLen; ++t) {
          const double along = a0 + dir * t * speed;
          ideal[t] = horizontal ? Vec2{along, cross} : Vec2{cross, along};
        }
        break;
      }
      case SynthLayout::TJunction: {
        const bool left = rng.bernoulli(spec.branch_left);
        const double speed = rng.uniform(spec.speed_min, spec.speed_max);
        const long k = rng.uniform_int(kMinTurnStep, kMaxTurnStep);
        const double arm_dir = left ? -1.0 : 1.0;
        for (int t = 0; t < kTrackLen; ++t) {
          if (t <= k)
            ideal[t] = {kJunctionX, kJunctionY - (k - t) * speed};
          else
            ideal[t] = {kJunctionX + arm_dir * (t - k) * speed, kJunctionY};
        }
        break;
      }
      case SynthLayout::Door: {
        const double x0 = rng.uniform(2.0, kWidth - 2.0);
        const double speed = rng.uniform(spec.speed_min, spec.speed_max);
        Vec2 pos{x0, 0.8};
        ideal[0] = pos;
        for (int t = 1; t < kTrackLen; ++t) {
          if (pos.y < kJunctionY) {
            const Vec2 to_door = Vec2{kJunctionX, kJunctionY} - pos;
            const double dist = to_door.norm();
            if (dist <= speed)
              pos = {kJunctionX, kJunctionY + (speed - dist)};
            else
              pos = pos + to_door * (speed / dist);
          } else {
            pos = pos + Vec2{0.0, speed};
          }
          ideal[t] = pos;
        }
        break;
      }
    }
    for (int t = 0; t < kTrackLen; ++t) {
      TrackPoint p;
      p.frame = j + t;
      p.ped_id = j + 1;
      const Vec2 noisy{ideal[t].x + rng.normal(0.0, spec.noise_sigma),
                       ideal[t].y + rng.normal(0.0, spec.noise_sigma)};
      const Vec2 inside = clamp_to_bounds(noisy, d.bounds);
      p.x = inside.x;
      p.y = inside.y;
      d.points.push_back(p);
    }
  }

  std::sort(d.points.begin(), d.points.end(),
            [](const TrackPoint& a, const TrackPoint& b) {
              if (a.frame != b.frame) return a.frame < b.frame;
              return a.ped_id < b.ped_id;
            });
  return d;
}

}  // namespace gridpath::data
