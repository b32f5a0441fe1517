#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridpath/grid/artifacts.hpp"
#include "gridpath/grid/bank.hpp"
#include "gridpath/model/model.hpp"
#include "gridpath/nn/optim.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::model {

std::string to_string(LocationMode m);
std::string to_string(DecodeMode m);
LocationMode parse_location(const std::string& name);
DecodeMode parse_decode(const std::string& name);

// Training bookkeeping carried across save and resume.
struct TrainState {
  int stage = 1;
  int epochs_completed = 0;
  double best_val_nll = 0.0;
  int best_val_epoch = -1;  // -1: no validation pass recorded yet
};

// Everything needed to resume training or run Test rollouts: weights, the
// scene memory, grid artifacts, the component configuration, and (while
// training) the Adam moments.
struct Checkpoint {
  ModelParams params;
  grid::GridArtifacts artifacts;
  grid::SceneStateBank bank;
  RolloutConfig rollout;
  std::uint64_t init_seed = 0;
  TrainState train;

  bool has_adam = false;
  std::uint64_t adam_step_count = 0;
  std::vector<nn::Tensor> adam_m;
  std::vector<nn::Tensor> adam_v;
};

void capture_adam(Checkpoint& ck, nn::Adam& opt);
void restore_adam(const Checkpoint& ck, nn::Adam& opt);

std::string checkpoint_to_json(Checkpoint& ck);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gridpath::model
