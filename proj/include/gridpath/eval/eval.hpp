#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/model/checkpoint.hpp"

namespace gridpath::eval {

// Mean Euclidean distance over aligned position pairs, in meters.
double ade(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth);

// Euclidean distance between the final positions, in meters.
double fde(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth);

// Least-squares affine fit of x(t) and y(t) over the observed points
// (t = 0, 1, ...), extrapolated for `steps` further steps.
std::vector<Vec2> linear_baseline(const std::vector<Vec2>& observed,
                                  int steps);

// One evaluated window: ground truth split at t_obs plus a prediction.
// `nonlinear` classifies the ground-truth future (never the prediction), so
// every configuration scores the identical window subset.
struct ScoredWindow {
  std::string scene_id;
  long long ped_id = 0;
  long long start_frame = 0;
  std::vector<Vec2> observed;
  std::vector<Vec2> truth;
  std::vector<Vec2> predicted;
  bool nonlinear = false;
};

// ADE restricted to windows flagged nonlinear; absent when none qualify.
std::optional<double> nde(const std::vector<ScoredWindow>& scored);

struct SceneMetrics {
  std::string scene_id;
  int windows = 0;
  int nonlinear_windows = 0;
  double ade = 0.0;
  double fde = 0.0;
  std::optional<double> nde;
};

struct ConfigMetrics {
  std::string config;  // ablation name or "Linear"
  std::vector<SceneMetrics> scenes;
  SceneMetrics overall;  // window-count-weighted means, scene_id "(all)"
};

struct MetricsReport {
  std::uint64_t config_fingerprint = 0;
  double theta_lin = 0.0;
  int t_obs = 0;
  int t_pred = 0;
  std::vector<ConfigMetrics> configs;
};

// Scores the checkpoint under every requested configuration name (ablation
// names plus "Linear" for the baseline) on one identical window set, with
// mean decoding. Windows must belong to the checkpoint's scene and have
// length t_obs + t_pred.
MetricsReport evaluate(model::Checkpoint& ck,
                       const std::vector<data::TrajectoryWindow>& windows,
                       const std::vector<std::string>& config_names,
                       const data::WindowParams& wp);

std::string report_to_json(const MetricsReport& r);
std::string report_to_csv(const MetricsReport& r);

}  // namespace gridpath::eval
