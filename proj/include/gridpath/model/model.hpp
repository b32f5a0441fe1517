#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridpath/data/windows.hpp"
#include "gridpath/grid/artifacts.hpp"
#include "gridpath/grid/bank.hpp"
#include "gridpath/nn/gaussian.hpp"
#include "gridpath/nn/layers.hpp"
#include "gridpath/nn/optim.hpp"
#include "gridpath/nn/param.hpp"
#include "gridpath/nn/rng.hpp"

namespace gridpath::model {

enum class LocationMode { Relative, Absolute };
enum class DecodeMode { Mean, Sample };

// Which components of the coupled model run. The ladder of the ablation
// study toggles these; invariants keep the combinations meaningful.
struct RolloutConfig {
  bool use_scene = true;       // scene memory read into the fusion step
  bool use_hf_grid = true;     // reads only in non-linear cells
  bool use_hf_subgrid = true;  // reads only on common subgrids
  bool use_sf = true;          // learned soft filter on the read state
  LocationMode location = LocationMode::Relative;
  DecodeMode decode = DecodeMode::Mean;
  std::uint64_t sample_seed = 0;

  void validate() const;
};

// Named ablation rows, in report order: PM_abs, PM_rel, +SD, +HF_grid,
// +HF_subgrid, +SF, full.
const std::vector<std::string>& ablation_names();
RolloutConfig ablation_config(const std::string& name);

struct ModelDims {
  int embed = 64;           // E
  int hidden = 128;         // H
  int subgrid_onehot = 64;  // m^2, the scene one-hot length

  int scene_input() const { return subgrid_onehot + hidden; }
  void validate() const;
};

// One global weight set: the pedestrian LSTM is shared across pedestrians
// and the scene LSTM across cells; per-pedestrian and per-cell memory lives
// in states, not weights.
struct ModelParams {
  ModelDims dims;
  nn::Parameter w_embed;     // (E, 2) embedding, no bias
  nn::LSTMCellParams ped;    // input E
  nn::LSTMCellParams scene;  // input m^2 + H
  nn::Parameter w_soft;      // (H, m^2 + H)
  nn::Parameter b_soft;      // (H)
  nn::Parameter w_out;       // (5, H) Gaussian head, no bias

  ModelParams() = default;
  ModelParams(const ModelDims& d, std::uint64_t seed);

  // Stable order; Adam moment slots and checkpoints rely on it.
  std::vector<nn::Parameter*> parameters();
};

struct BatchOptions {
  nn::Mode mode = nn::Mode::Train;
  double dropout_rate = 0.0;
  nn::RngStream* dropout_rng = nullptr;  // required when a mask is drawn
  bool compute_gradients = false;        // backward into Parameter::grad
  nn::Adam* optimizer = nullptr;         // full step: zero, backward, clip, adam
  double lr = 0.003;
  double clip = 10.0;
};

// Teacher-forced pass over one mini-batch of windows from a single scene.
// Frames advance in lockstep across windows (ascending ped_id within a
// frame); per step and pedestrian: LSTM step, hard filter, soft filter +
// fusion, loss term, scene update. Scene writes land in `bank` (detached
// from the graph at batch boundaries). Returns the batch loss: sum of
// per-window NLLs divided by the number of windows.
double run_batch(ModelParams& params, const grid::GridArtifacts& artifacts,
                 grid::SceneStateBank& bank,
                 const std::vector<const data::TrajectoryWindow*>& windows,
                 long long frame_stride, const RolloutConfig& cfg,
                 const BatchOptions& opt);

struct Prediction {
  std::vector<Vec2> positions;         // predicted absolute positions
  std::vector<nn::Gauss2D> gaussians;  // one per predicted position
};

// Test-phase rollout: ground truth feeds the first t_obs steps, decoded
// positions feed the rest; grid lookups clamp predicted positions into
// bounds; the bank must be frozen and is never written. Pure: repeated calls
// give identical results.
Prediction rollout_test(ModelParams& params,
                        const grid::GridArtifacts& artifacts,
                        const grid::SceneStateBank& bank,
                        const data::TrajectoryWindow& window, int t_obs,
                        const RolloutConfig& cfg);

}  // namespace gridpath::model
