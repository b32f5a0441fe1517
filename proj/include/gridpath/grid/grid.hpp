#pragma once

#include <cstddef>

#include "gridpath/common.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::grid {

// Two-level grid geometry: n x n cells over the unit square, each split into
// m x m subgrids. Everything is row-major: id = row * axis + col with the row
// taken from the vertical (v) coordinate.
struct GridSpec {
  int n = 8;  // cells per axis
  int m = 8;  // subgrids per axis within one cell

  int cell_count() const { return n * n; }
  int subgrid_count() const { return m * m; }

  void validate() const {
    if (n < 1 || m < 1)
      throw ConfigError("grid: n and m must be at least 1");
  }
};

struct Located {
  int cell = 0;     // [0, n^2)
  int subgrid = 0;  // [0, m^2), local to the cell
};

// Half-open interval indexing with boundary points assigned upward; inputs
// must lie in [0,1)^2.
Located locate(Vec2 u, const GridSpec& spec);

// Basis vector of length m^2 for the subgrid id.
nn::Tensor one_hot(int subgrid, const GridSpec& spec);

}  // namespace gridpath::grid
