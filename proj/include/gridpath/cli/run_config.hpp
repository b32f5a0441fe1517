#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridpath/io/kv.hpp"
#include "gridpath/train/train.hpp"

namespace gridpath::cli {

// Fully resolved run configuration: defaults, then the `key = value` config
// file, then the GRIDPATH_OUT environment variable, then command-line
// overrides (--seed, --out, --set key=value), in that order. Unknown keys are
// rejected at every layer. `fingerprint` hashes the semantic keys only --
// output locations and other file paths are excluded, so runs writing to
// different directories still share a fingerprint.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string data_dir;  // resolved; defaults to <out_dir>/data
  std::vector<std::string> scenes;
  std::string held_out;
  double stage2_fraction = 0.5;
  std::string components = "full";  // ablation name for training/prediction
  std::string decode = "mean";      // prediction decoding: mean | sample
  bool resume = false;              // continue stage 1 from the last checkpoint

  train::TrainConfig train;  // hyperparameters, grid, window geometry

  std::string synth_layout = "tjunction";
  std::string synth_scene = "synth";
  double synth_branch_left = 0.5;
  double synth_branch_right = 0.5;
  int synth_peds = 100;
  double synth_speed_min = 0.2;
  double synth_speed_max = 0.3;
  double synth_noise_sigma = 0.0;

  std::string ingest_input;
  std::string ingest_scene = "scene";
  std::string ingest_columns = "frame,ped_id,x,y";
  std::string ingest_delimiter = "space";

  std::vector<std::string> eval_configs;
  std::string checkpoint;   // resolved; defaults to <out>/checkpoints/stage2.json
  std::string predictions;  // resolved; defaults to <out>/predictions.csv
  int plot_limit = 8;       // max SVG files; 0 means unlimited
  std::vector<int> sweep_sizes;

  std::uint64_t fingerprint = 0;
  // Every key in registry order with its resolved value (manifests embed it).
  std::vector<std::pair<std::string, std::string>> resolved;

  std::string scene_csv_path(const std::string& id) const;
  std::string scene_meta_path(const std::string& id) const;
  std::string artifacts_path(const std::string& id) const;
  std::string checkpoint_path() const;
  std::string stage1_best_path() const;
  std::string stage1_last_path() const;
  std::string predictions_path() const;
  std::string plots_dir() const;
  std::string manifest_path(const std::string& command) const;
};

// Raw command-line state collected by the argument parser.
struct CliOverrides {
  std::string config_path;             // --config; empty = defaults only
  std::optional<std::uint64_t> seed;   // --seed
  std::string out_dir;                 // --out; empty = not given
  std::vector<std::string> sets;       // --set key=value, in order
};

// Applies overrides onto the parsed config file and validates everything.
// ConfigError on unknown keys, malformed values or inconsistent settings.
RunConfig resolve_config(const CliOverrides& overrides);

// Resolution core without file/environment access, for direct testing.
RunConfig config_from_entries(
    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace gridpath::cli
