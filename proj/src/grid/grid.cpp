#include "gridpath/grid/grid.hpp"

#include <cmath>

namespace gridpath::grid {

namespace {

// floor(x * axis) clamped into [0, axis); the clamp catches the rare case
// where rounding pushes x * axis up to exactly `axis`.
int scaled_floor(double x, int axis) {
  int idx = static_cast<int>(std::floor(x * axis));
  if (idx >= axis) idx = axis - 1;
  if (idx < 0) idx = 0;
  return idx;
}

}  // namespace

Located locate(Vec2 u, const GridSpec& spec) {
  spec.validate();
  if (!(u.x >= 0.0 && u.x < 1.0 && u.y >= 0.0 && u.y < 1.0))
    throw InvariantError("locate: coordinates must lie in [0,1)^2");

  const int col = scaled_floor(u.x, spec.n);
  const int row = scaled_floor(u.y, spec.n);

  // local coordinates inside the cell, again in [0,1)
  const double lu = u.x * spec.n - col;
  const double lv = u.y * spec.n - row;
  const int scol = scaled_floor(lu, spec.m);
  const int srow = scaled_floor(lv, spec.m);

  Located loc;
  loc.cell = row * spec.n + col;
  loc.subgrid = srow * spec.m + scol;
  return loc;
}

nn::Tensor one_hot(int subgrid, const GridSpec& spec) {
  spec.validate();
  if (subgrid < 0 || subgrid >= spec.subgrid_count())
    throw InvariantError("one_hot: subgrid id out of range");
  nn::Tensor t = nn::Tensor::zeros(
      {static_cast<std::size_t>(spec.subgrid_count())});
  t[static_cast<std::size_t>(subgrid)] = 1.0;
  return t;
}

}  // namespace gridpath::grid
