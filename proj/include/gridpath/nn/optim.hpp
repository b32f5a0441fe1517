#pragma once

#include <cstdint>
#include <vector>

#include "gridpath/nn/param.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Moment slots follow the
// construction order of `params`, which checkpointing relies on.
class Adam {
 public:
  explicit Adam(std::vector<Parameter*> params, AdamConfig cfg = {});

  void step(double lr);
  void zero_grad();

  std::uint64_t step_count() const { return t_; }
  const std::vector<Parameter*>& params() const { return params_; }
  const AdamConfig& config() const { return cfg_; }

  // Checkpoint access: moments and step counter are restored verbatim.
  std::vector<Tensor>& first_moments() { return m_; }
  std::vector<Tensor>& second_moments() { return v_; }
  void set_step_count(std::uint64_t t) { t_ = t; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> m_, v_;
  std::uint64_t t_ = 0;
  AdamConfig cfg_;
};

// Scales every gradient by threshold/norm when the global L2 norm strictly
// exceeds the threshold; returns the scale actually applied (1.0 otherwise).
double clip_global_norm(const std::vector<Parameter*>& params,
                        double threshold);

void zero_grads(const std::vector<Parameter*>& params);

}  // namespace gridpath::nn
