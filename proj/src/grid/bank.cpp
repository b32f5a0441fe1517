#include "gridpath/grid/bank.hpp"

#include <cstddef>
#include <utility>

#include "gridpath/common.hpp"

namespace gridpath::grid {

SceneStateBank::SceneStateBank(std::vector<bool> updatable, int hidden_dim)
    : hidden_dim_(hidden_dim), updatable_(std::move(updatable)) {
  if (hidden_dim_ <= 0)
    throw InvariantError("SceneStateBank: hidden_dim must be positive");
  if (updatable_.empty())
    throw InvariantError("SceneStateBank: need at least one cell");
  const auto cells = updatable_.size();
  const auto dim = static_cast<std::size_t>(hidden_dim_);
  h_.assign(cells, nn::Tensor::zeros({dim}));
  c_.assign(cells, nn::Tensor::zeros({dim}));
}

SceneStateBank SceneStateBank::from_classes(
    const std::vector<CellClass>& classes, int hidden_dim) {
  std::vector<bool> updatable(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i)
    updatable[i] = classes[i] == CellClass::NonLinear;
  return SceneStateBank(std::move(updatable), hidden_dim);
}

bool SceneStateBank::updatable(int cell) const {
  check_cell(cell);
  return updatable_[static_cast<std::size_t>(cell)];
}

const nn::Tensor& SceneStateBank::h(int cell) const {
  check_cell(cell);
  return h_[static_cast<std::size_t>(cell)];
}

const nn::Tensor& SceneStateBank::c(int cell) const {
  check_cell(cell);
  return c_[static_cast<std::size_t>(cell)];
}

void SceneStateBank::set(int cell, nn::Tensor h, nn::Tensor c) {
  check_cell(cell);
  if (frozen_) throw InvariantError("SceneStateBank: bank is frozen");
  if (!updatable_[static_cast<std::size_t>(cell)])
    throw InvariantError("SceneStateBank: write to a linear cell");
  const auto dim = static_cast<std::size_t>(hidden_dim_);
  if (h.shape() != std::vector<std::size_t>{dim} ||
      c.shape() != std::vector<std::size_t>{dim})
    throw InvariantError("SceneStateBank: state shape mismatch");
  h_[static_cast<std::size_t>(cell)] = std::move(h);
  c_[static_cast<std::size_t>(cell)] = std::move(c);
}

void SceneStateBank::reset() {
  if (frozen_) throw InvariantError("SceneStateBank: cannot reset when frozen");
  for (auto& t : h_) t.fill(0.0);
  for (auto& t : c_) t.fill(0.0);
}

void SceneStateBank::check_cell(int cell) const {
  if (cell < 0 || static_cast<std::size_t>(cell) >= updatable_.size())
    throw InvariantError("SceneStateBank: cell index out of range");
}

}  // namespace gridpath::grid
