#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridpath/nn/rng.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::nn {

// A named trainable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)) {
    grad = Tensor::zeros(value.shape());
  }

  void zero_grad() { grad.fill(0.0); }
};

// Uniform(-scale, scale) init from a substream derived from the parameter's
// own name, so adding or removing other parameters never shifts this one's
// draws.
inline Parameter init_uniform(const std::string& name,
                              std::vector<std::size_t> shape,
                              std::uint64_t root_seed, double scale) {
  RngStream rng(root_seed, "init/" + name);
  Tensor t = Tensor::zeros(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = rng.uniform(-scale, scale);
  return Parameter(name, std::move(t));
}

inline Parameter init_zeros(const std::string& name,
                            std::vector<std::size_t> shape) {
  return Parameter(name, Tensor::zeros(std::move(shape)));
}

// One LSTM cell's weights: stacked gate order [i, f, g, o] along the first
// axis, matching the row slices taken in lstm_step.
struct LSTMCellParams {
  Parameter w_in;   // (4H, D)
  Parameter w_rec;  // (4H, H)
  Parameter bias;   // (4H)

  LSTMCellParams() = default;
  LSTMCellParams(const std::string& prefix, std::size_t input_dim,
                 std::size_t hidden_dim, std::uint64_t root_seed,
                 double scale) {
    w_in = init_uniform(prefix + ".w_in", {4 * hidden_dim, input_dim},
                        root_seed, scale);
    w_rec = init_uniform(prefix + ".w_rec", {4 * hidden_dim, hidden_dim},
                         root_seed, scale);
    bias = init_zeros(prefix + ".bias", {4 * hidden_dim});
  }

  std::size_t hidden_dim() const { return bias.value.size() / 4; }

  std::vector<Parameter*> params() { return {&w_in, &w_rec, &bias}; }
};

}  // namespace gridpath::nn
