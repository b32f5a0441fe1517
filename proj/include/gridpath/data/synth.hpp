#pragma once

#include <cstdint>
#include <string>

#include "gridpath/data/dataset.hpp"

namespace gridpath::data {

// Controlled synthetic scenes for verification. All layouts share a 16 x 12 m
// scene; tracks are exactly 20 points at one annotated frame per step, and
// pedestrian j enters at frame j so windows stagger in time.
//
//   Straight  -- axis-aligned crossings (alternating horizontal/vertical).
//   TJunction -- walk up the center corridor, then branch left/right at the
//                junction (8.4, 6.3) with the given probabilities.
//   Door      -- approach the doorway at (8.4, 6.3) diagonally from the bottom
//                edge, pass through, continue upward.
enum class SynthLayout { Straight, TJunction, Door };

struct SynthSceneSpec {
  SynthLayout layout = SynthLayout::TJunction;
  std::string scene_id = "synth";
  double branch_left = 0.5;   // TJunction only
  double branch_right = 0.5;  // must sum to 1 with branch_left
  int ped_count = 100;
  double speed_min = 0.2;  // m per step, uniform
  double speed_max = 0.3;
  double noise_sigma = 0.0;  // isotropic Gaussian positional noise, meters
  std::uint64_t seed = 1;
};

SynthLayout parse_layout(const std::string& name);
SceneDataset synth_generate(const SynthSceneSpec& spec);

}  // namespace gridpath::data
