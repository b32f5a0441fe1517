#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "gridpath/nn/optim.hpp"
#include "gridpath/nn/param.hpp"

namespace testutil {

struct FdResult {
  double max_rel = 0.0;
  std::size_t checked = 0;
};

// Central-finite-difference check of every entry of every parameter.
//
// `eval(true)` must run a fresh forward pass, call backward, and return the
// loss (gradients accumulate into the parameters). `eval(false)` must run the
// same forward pass without backward. The forward pass has to be a pure
// function of the parameter values — any randomness must be re-seeded
// identically on every call.
inline FdResult fd_check(const std::vector<gridpath::nn::Parameter*>& params,
                         const std::function<double(bool)>& eval,
                         double step = 1e-5) {
  gridpath::nn::zero_grads(params);
  eval(true);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto* p : params) {
    std::vector<double> g(p->grad.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = p->grad[i];
    analytic.push_back(std::move(g));
  }

  FdResult r;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    gridpath::nn::Parameter& p = *params[pi];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + step;
      const double f_plus = eval(false);
      p.value[i] = saved - step;
      const double f_minus = eval(false);
      p.value[i] = saved;
      const double fd = (f_plus - f_minus) / (2.0 * step);
      const double a = analytic[pi][i];
      const double denom =
          std::max(1.0, std::max(std::fabs(a), std::fabs(fd)));
      r.max_rel = std::max(r.max_rel, std::fabs(a - fd) / denom);
      ++r.checked;
    }
  }
  return r;
}

}  // namespace testutil
