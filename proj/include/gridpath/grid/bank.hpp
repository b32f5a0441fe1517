#pragma once

#include <vector>

#include "gridpath/grid/artifacts.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::grid {

// Per-cell LSTM memory shared by all pedestrians in a scene. Only non-linear
// cells accept writes; once frozen (end of fine-tuning) the bank is
// permanently read-only.
class SceneStateBank {
 public:
  SceneStateBank() = default;
  SceneStateBank(std::vector<bool> updatable, int hidden_dim);

  static SceneStateBank from_classes(const std::vector<CellClass>& classes,
                                     int hidden_dim);

  int cell_count() const { return static_cast<int>(updatable_.size()); }
  int hidden_dim() const { return hidden_dim_; }
  bool frozen() const { return frozen_; }
  bool updatable(int cell) const;

  const nn::Tensor& h(int cell) const;
  const nn::Tensor& c(int cell) const;

  // Overwrite one cell's state; rejected when frozen or the cell is linear.
  void set(int cell, nn::Tensor h, nn::Tensor c);

  void reset();             // zero every state; rejected when frozen
  void freeze() { frozen_ = true; }

 private:
  void check_cell(int cell) const;

  int hidden_dim_ = 0;
  std::vector<bool> updatable_;
  std::vector<nn::Tensor> h_;
  std::vector<nn::Tensor> c_;
  bool frozen_ = false;
};

}  // namespace gridpath::grid
