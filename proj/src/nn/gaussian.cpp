#include "gridpath/nn/gaussian.hpp"

#include <cmath>

namespace gridpath::nn {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;

void require_finite(const Gauss2D& g, Vec2 target) {
  if (!std::isfinite(g.mux) || !std::isfinite(g.muy) ||
      !std::isfinite(g.sx) || !std::isfinite(g.sy) ||
      !std::isfinite(g.rho) || !std::isfinite(target.x) ||
      !std::isfinite(target.y))
    throw InvariantError("bvn_nll: non-finite input");
}
}  // namespace

Gauss2D gauss_from_raw(const double* r) {
  Gauss2D g;
  g.mux = r[0];
  g.muy = r[1];
  g.sx = std::exp(r[2]);
  g.sy = std::exp(r[3]);
  g.rho = std::tanh(r[4]);
  return g;
}

Gauss2D gauss_from_raw(const Tensor& raw5) {
  if (raw5.size() != 5)
    throw InvariantError("gauss_from_raw: expected a 5-vector, got " +
                         raw5.shape_str());
  return gauss_from_raw(raw5.data());
}

double bvn_nll(const Gauss2D& g, Vec2 target) {
  require_finite(g, target);
  const double zx = (target.x - g.mux) / g.sx;
  const double zy = (target.y - g.muy) / g.sy;
  const double om = 1.0 - g.rho * g.rho;
  const double q = zx * zx - 2.0 * g.rho * zx * zy + zy * zy;
  return kLog2Pi + std::log(g.sx) + std::log(g.sy) + 0.5 * std::log(om) +
         q / (2.0 * om);
}

double bvn_nll_raw(const double* r, double tx, double ty) {
  const double sx = std::exp(r[2]);
  const double sy = std::exp(r[3]);
  const double rho = std::tanh(r[4]);
  const double zx = (tx - r[0]) / sx;
  const double zy = (ty - r[1]) / sy;
  // 1 - tanh^2 computed as sech^2 to dodge the cancellation near |rho| = 1.
  const double ch = std::cosh(r[4]);
  const double om = 1.0 / (ch * ch);
  const double q = zx * zx - 2.0 * rho * zx * zy + zy * zy;
  const double nll = kLog2Pi + r[2] + r[3] + 0.5 * std::log(om) +
                     q / (2.0 * om);
  if (!std::isfinite(nll)) throw InvariantError("bvn_nll_raw: non-finite loss");
  return nll;
}

void bvn_nll_raw_grad(const double* r, double tx, double ty, double go,
                      double* out) {
  const double sx = std::exp(r[2]);
  const double sy = std::exp(r[3]);
  const double rho = std::tanh(r[4]);
  const double zx = (tx - r[0]) / sx;
  const double zy = (ty - r[1]) / sy;
  const double ch = std::cosh(r[4]);
  const double om = 1.0 / (ch * ch);
  const double q = zx * zx - 2.0 * rho * zx * zy + zy * zy;
  out[0] += go * (-(zx - rho * zy) / (om * sx));
  out[1] += go * (-(zy - rho * zx) / (om * sy));
  out[2] += go * (1.0 - zx * (zx - rho * zy) / om);
  out[3] += go * (1.0 - zy * (zy - rho * zx) / om);
  out[4] += go * (-rho + rho * q / om - zx * zy);
}

Vec2 bvn_sample(const Gauss2D& g, RngStream& rng) {
  const double n1 = rng.normal();
  const double n2 = rng.normal();
  // Cholesky factor of [[sx^2, rho sx sy], [rho sx sy, sy^2]].
  const double x = g.mux + g.sx * n1;
  const double y = g.muy + g.sy * (g.rho * n1 +
                                   std::sqrt(1.0 - g.rho * g.rho) * n2);
  return {x, y};
}

}  // namespace gridpath::nn
