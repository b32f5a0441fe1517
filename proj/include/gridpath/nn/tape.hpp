#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gridpath/common.hpp"
#include "gridpath/nn/param.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::nn {

using NodeId = std::uint32_t;

enum class Op : std::uint8_t {
  Leaf,     // trainable parameter (gradient flows to Parameter::grad)
  Const,    // data, no gradient
  MatVec,   // (m,n) matrix node times (n) vector node
  Add,      // elementwise, same shape
  Mul,      // elementwise (Hadamard), same shape
  Concat,   // 1-D concatenation of vector nodes
  Slice,    // contiguous 1-D slice
  Sigmoid,  // elementwise
  Tanh,     // elementwise
  Relu,     // elementwise
  Scale,    // multiply by a fixed scalar
  AddMany,  // left-to-right sum of same-shape nodes
  BvnNll,   // scalar negative log-likelihood of a bivariate Gaussian head
};

struct Node {
  Op op;
  Tensor val;
  Tensor grad;                  // allocated during backward
  NodeId in0 = 0, in1 = 0;      // inputs for ops with at most two
  std::vector<NodeId> ins;      // inputs for Concat / AddMany
  Parameter* param = nullptr;   // Leaf only
  std::size_t start = 0;        // Slice
  double factor = 0.0;          // Scale
  double tx = 0.0, ty = 0.0;    // BvnNll target
};

// Append-only computation record. Node ids are ascending, so a reverse sweep
// from the loss visits every dependency after all of its consumers.
//
// backward() accumulates into Parameter::grad: two calls on the same tape
// double the parameter gradients, matching the usual zero_grad contract.
class Tape {
 public:
  NodeId leaf(Parameter& p);
  NodeId constant(Tensor t);
  NodeId matvec(NodeId w, NodeId x);
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId concat(const std::vector<NodeId>& parts);
  NodeId slice(NodeId a, std::size_t start, std::size_t len);
  NodeId sigmoid(NodeId a);
  NodeId tanh(NodeId a);
  NodeId relu(NodeId a);
  NodeId scale(NodeId a, double factor);
  NodeId add_many(const std::vector<NodeId>& terms);
  NodeId bvn_nll(NodeId raw, Vec2 target);

  const Tensor& val(NodeId id) const { return nodes_[id].val; }
  // Valid after backward(); zero tensors for nodes the loss never touched.
  const Tensor& node_grad(NodeId id) const { return nodes_[id].grad; }

  void backward(NodeId loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  NodeId push(Node n);
  Node& node(NodeId id) { return nodes_[id]; }

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, NodeId> leaf_cache_;
};

}  // namespace gridpath::nn
