#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridpath/data/dataset.hpp"
#include "gridpath/data/splits.hpp"
#include "gridpath/data/windows.hpp"
#include "gridpath/grid/grid.hpp"
#include "gridpath/model/checkpoint.hpp"
#include "gridpath/model/model.hpp"

namespace gridpath::train {

// Two-stage training hyperparameters. Defaults follow the reference
// protocol: lr 0.003, dropout 0.2, gradient clip 10, hidden 128,
// 100 + 10 epochs, 8x8 grid over 8x8 subgrids.
struct TrainConfig {
  double lr = 0.003;
  double dropout = 0.2;
  double clip = 10.0;
  int hidden = 128;
  int embed = 64;
  int stage1_epochs = 100;
  int stage2_epochs = 10;
  int batch_size = 8;
  std::uint64_t seed = 1;
  model::RolloutConfig rollout;  // component set being trained
  grid::GridSpec grid;
  double theta_lin = 0.10;
  int p = 3;
  data::WindowParams windows;

  model::ModelDims dims() const;
  void validate() const;  // ConfigError on out-of-range values
};

struct EpochRecord {
  int stage = 1;
  int epoch = 0;  // 1-based within its stage
  double train_nll = 0.0;
  std::optional<double> val_nll;  // stage 1 only
};

struct Stage1Result {
  // Checkpoint with the lowest validation NLL among the epochs this call
  // executed. On a resumed run, earlier epochs are not re-materialized;
  // callers keep the previously saved best and compare recorded values.
  model::Checkpoint best;
  // Final-epoch checkpoint carrying the Adam state; feed it back through
  // `resume` to continue the identical run.
  model::Checkpoint last;
  std::vector<EpochRecord> history;
};

// Stage 1: train on the pooled 80% window split with per-epoch validation on
// the other 20%. Scene banks reset at each epoch start; dropout streams are
// named per (scene, absolute epoch), so a resumed run consumes the exact
// random sequence of an uninterrupted one.
Stage1Result train_stage1(const std::vector<data::SceneDataset>& scenes,
                          const std::vector<data::TrajectoryWindow>& train_set,
                          const std::vector<data::TrajectoryWindow>& val_set,
                          const TrainConfig& cfg,
                          const model::Checkpoint* resume = nullptr);

struct Stage2Result {
  model::Checkpoint final;  // frozen bank, held-out-scene artifacts
  std::vector<EpochRecord> history;
};

// Stage 2: fine-tune stage-1 weights on the early `fraction` of the held-out
// scene (windows and boundary from `splits`), then freeze the scene bank of
// the last epoch into the checkpoint. Grid artifacts are rebuilt from the
// held-out scene's training frames only; test-range frames are never read.
Stage2Result train_stage2(const model::Checkpoint& stage1,
                          const data::SceneDataset& held_out,
                          const data::Splits& splits, double fraction,
                          const TrainConfig& cfg);

struct SweepRow {
  int n = 0;
  int m = 0;
  double ade = 0.0;
  double fde = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // m-sweep rows first, then n-sweep rows
  int best_m = 0;              // lowest ADE in the m sweep
  int best_n = 0;              // lowest ADE in the n sweep
};

// Grid-size ablation: fix n = base.grid.n and vary m over `sizes`, pick the
// m with the lowest ADE, then vary n over `sizes` at that m. Each point runs
// the full two-stage protocol and scores mean-decoded predictions on the
// held-out test windows. Points run in parallel.
SweepResult sweep_grid_sizes(const std::vector<data::SceneDataset>& datasets,
                             const std::string& held_out_scene,
                             double fraction, const TrainConfig& base,
                             const std::vector<int>& sizes);

std::string sweep_to_csv(const SweepResult& result);

// `stage,epoch,train_nll,val_nll` rows; the last column is empty in stage 2.
std::string history_to_csv(const std::vector<EpochRecord>& history);

// Content hash of the canonical CSV export, recorded in manifests.
std::uint64_t dataset_hash(const data::SceneDataset& d);

struct RunManifest {
  std::string command;
  std::uint64_t config_fingerprint = 0;
  std::vector<std::pair<std::string, std::string>> config;  // resolved pairs
  std::vector<std::pair<std::string, std::uint64_t>> dataset_hashes;
  std::vector<EpochRecord> history;
  std::string checkpoint_path;
  double wall_seconds = 0.0;  // informational; excluded from determinism
};

std::string manifest_to_json(const RunManifest& m);

}  // namespace gridpath::train
