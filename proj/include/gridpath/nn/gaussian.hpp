#pragma once

#include "gridpath/common.hpp"
#include "gridpath/nn/rng.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::nn {

// Bivariate Gaussian over a displacement, with validity guaranteed by the
// exp/tanh reparameterization in gauss_from_raw (sigmas positive, |rho| < 1).
struct Gauss2D {
  double mux = 0.0, muy = 0.0;
  double sx = 1.0, sy = 1.0;
  double rho = 0.0;
};

// Raw head output (a,b,c,d,e) -> (a, b, exp(c), exp(d), tanh(e)).
Gauss2D gauss_from_raw(const double* raw5);
Gauss2D gauss_from_raw(const Tensor& raw5);

// Negative log density at `target`. Rejects non-finite inputs.
double bvn_nll(const Gauss2D& g, Vec2 target);

// Same loss written over the raw 5-vector, plus its closed-form gradient.
// These two back the tape's BvnNll node; grad *accumulates* out[i] += go*d_i.
double bvn_nll_raw(const double* raw5, double tx, double ty);
void bvn_nll_raw_grad(const double* raw5, double tx, double ty, double go,
                      double* out5);

inline Vec2 bvn_mean(const Gauss2D& g) { return {g.mux, g.muy}; }

// Draws via the Cholesky factor of the covariance; consumes exactly two
// normal variates.
Vec2 bvn_sample(const Gauss2D& g, RngStream& rng);

}  // namespace gridpath::nn
