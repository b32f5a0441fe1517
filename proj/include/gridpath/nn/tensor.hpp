#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "gridpath/common.hpp"

namespace gridpath::nn {

// Dense row-major tensor of doubles. Only the ranks the model needs (vectors
// and matrices); no broadcasting.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape) {
    Tensor t;
    t.shape_ = std::move(shape);
    t.v_.assign(numel(t.shape_), 0.0);
    return t;
  }

  static Tensor full(std::vector<std::size_t> shape, double value) {
    Tensor t = zeros(std::move(shape));
    for (double& x : t.v_) x = value;
    return t;
  }

  static Tensor scalar(double value) {
    Tensor t;
    t.shape_ = {1};
    t.v_ = {value};
    return t;
  }

  static Tensor vec(std::vector<double> values) {
    Tensor t;
    t.shape_ = {values.size()};
    t.v_ = std::move(values);
    return t;
  }

  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values) {
    if (values.size() != rows * cols)
      throw InvariantError("Tensor::matrix: value count does not match shape");
    Tensor t;
    t.shape_ = {rows, cols};
    t.v_ = std::move(values);
    return t;
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }

  double at(std::size_t r, std::size_t c) const { return v_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return v_[r * cols() + c]; }

  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void fill(double value) {
    for (double& x : v_) x = value;
  }

  void add_inplace(const Tensor& o) {
    if (!same_shape(o)) throw InvariantError("Tensor add: shape mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  }

  double squared_norm() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return s;
  }

  void scale_inplace(double s) {
    for (double& x : v_) x *= s;
  }

  bool operator==(const Tensor& o) const {
    return shape_ == o.shape_ && v_ == o.v_;
  }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape_[i]);
    }
    return s + ")";
  }

 private:
  static std::size_t numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  std::vector<std::size_t> shape_;
  std::vector<double> v_;
};

}  // namespace gridpath::nn
