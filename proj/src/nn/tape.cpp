#include "gridpath/nn/tape.hpp"

#include <cmath>

#include "gridpath/nn/gaussian.hpp"

namespace gridpath::nn {

namespace {
void require_vector(const Tensor& t, const char* who) {
  if (t.shape().size() != 1)
    throw InvariantError(std::string(who) + ": expected a rank-1 tensor, got " +
                         t.shape_str());
}
}  // namespace

NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::leaf(Parameter& p) {
  auto it = leaf_cache_.find(&p);
  if (it != leaf_cache_.end()) return it->second;
  Node n;
  n.op = Op::Leaf;
  n.val = p.value;
  n.param = &p;
  NodeId id = push(std::move(n));
  leaf_cache_.emplace(&p, id);
  return id;
}

NodeId Tape::constant(Tensor t) {
  Node n;
  n.op = Op::Const;
  n.val = std::move(t);
  return push(std::move(n));
}

NodeId Tape::matvec(NodeId w, NodeId x) {
  const Tensor& wv = nodes_[w].val;
  const Tensor& xv = nodes_[x].val;
  if (wv.shape().size() != 2)
    throw InvariantError("matvec: weight must be rank-2, got " +
                         wv.shape_str());
  require_vector(xv, "matvec");
  if (wv.cols() != xv.size())
    throw InvariantError("matvec: " + wv.shape_str() + " times " +
                         xv.shape_str());
  Node n;
  n.op = Op::MatVec;
  n.in0 = w;
  n.in1 = x;
  n.val = Tensor::zeros({wv.rows()});
  const std::size_t m = wv.rows(), k = wv.cols();
  const double* W = wv.data();
  const double* xd = xv.data();
  double* y = n.val.data();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* row = W + i * k;
    for (std::size_t j = 0; j < k; ++j) acc += row[j] * xd[j];
    y[i] = acc;
  }
  return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (!av.same_shape(bv))
    throw InvariantError("add: shape mismatch " + av.shape_str() + " vs " +
                         bv.shape_str());
  Node n;
  n.op = Op::Add;
  n.in0 = a;
  n.in1 = b;
  n.val = av;
  n.val.add_inplace(bv);
  return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (!av.same_shape(bv))
    throw InvariantError("mul: shape mismatch " + av.shape_str() + " vs " +
                         bv.shape_str());
  Node n;
  n.op = Op::Mul;
  n.in0 = a;
  n.in1 = b;
  n.val = av;
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] *= bv[i];
  return push(std::move(n));
}

NodeId Tape::concat(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw InvariantError("concat: no inputs");
  std::size_t total = 0;
  for (NodeId id : parts) {
    require_vector(nodes_[id].val, "concat");
    total += nodes_[id].val.size();
  }
  Node n;
  n.op = Op::Concat;
  n.ins = parts;
  n.val = Tensor::zeros({total});
  std::size_t off = 0;
  for (NodeId id : parts) {
    const Tensor& part = nodes_[id].val;
    for (std::size_t i = 0; i < part.size(); ++i) n.val[off + i] = part[i];
    off += part.size();
  }
  return push(std::move(n));
}

NodeId Tape::slice(NodeId a, std::size_t start, std::size_t len) {
  const Tensor& av = nodes_[a].val;
  require_vector(av, "slice");
  if (start + len > av.size())
    throw InvariantError("slice: [" + std::to_string(start) + ", " +
                         std::to_string(start + len) + ") out of " +
                         av.shape_str());
  Node n;
  n.op = Op::Slice;
  n.in0 = a;
  n.start = start;
  n.val = Tensor::zeros({len});
  for (std::size_t i = 0; i < len; ++i) n.val[i] = av[start + i];
  return push(std::move(n));
}

NodeId Tape::sigmoid(NodeId a) {
  Node n;
  n.op = Op::Sigmoid;
  n.in0 = a;
  n.val = nodes_[a].val;
  for (std::size_t i = 0; i < n.val.size(); ++i)
    n.val[i] = 1.0 / (1.0 + std::exp(-n.val[i]));
  return push(std::move(n));
}

NodeId Tape::tanh(NodeId a) {
  Node n;
  n.op = Op::Tanh;
  n.in0 = a;
  n.val = nodes_[a].val;
  for (std::size_t i = 0; i < n.val.size(); ++i)
    n.val[i] = std::tanh(n.val[i]);
  return push(std::move(n));
}

NodeId Tape::relu(NodeId a) {
  Node n;
  n.op = Op::Relu;
  n.in0 = a;
  n.val = nodes_[a].val;
  for (std::size_t i = 0; i < n.val.size(); ++i)
    if (n.val[i] < 0.0) n.val[i] = 0.0;
  return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double factor) {
  Node n;
  n.op = Op::Scale;
  n.in0 = a;
  n.factor = factor;
  n.val = nodes_[a].val;
  n.val.scale_inplace(factor);
  return push(std::move(n));
}

NodeId Tape::add_many(const std::vector<NodeId>& terms) {
  if (terms.empty()) throw InvariantError("add_many: no inputs");
  const Tensor& first = nodes_[terms[0]].val;
  Node n;
  n.op = Op::AddMany;
  n.ins = terms;
  n.val = first;
  for (std::size_t t = 1; t < terms.size(); ++t) {
    const Tensor& tv = nodes_[terms[t]].val;
    if (!tv.same_shape(first))
      throw InvariantError("add_many: shape mismatch " + first.shape_str() +
                           " vs " + tv.shape_str());
    n.val.add_inplace(tv);
  }
  return push(std::move(n));
}

NodeId Tape::bvn_nll(NodeId raw, Vec2 target) {
  const Tensor& rv = nodes_[raw].val;
  if (rv.size() != 5 || rv.shape().size() != 1)
    throw InvariantError("bvn_nll: expected a 5-vector, got " +
                         rv.shape_str());
  Node n;
  n.op = Op::BvnNll;
  n.in0 = raw;
  n.tx = target.x;
  n.ty = target.y;
  n.val = Tensor::scalar(bvn_nll_raw(rv.data(), target.x, target.y));
  return push(std::move(n));
}

void Tape::backward(NodeId loss) {
  if (nodes_.empty() || loss >= nodes_.size())
    throw InvariantError("backward: no recorded forward pass for that node");
  if (nodes_[loss].val.size() != 1)
    throw InvariantError("backward: loss must be scalar, got " +
                         nodes_[loss].val.shape_str());
  for (NodeId id = 0; id <= loss; ++id)
    nodes_[id].grad = Tensor::zeros(nodes_[id].val.shape());
  nodes_[loss].grad[0] = 1.0;

  for (NodeId id = loss + 1; id-- > 0;) {
    Node& n = nodes_[id];
    switch (n.op) {
      case Op::Leaf:
        n.param->grad.add_inplace(n.grad);
        break;
      case Op::Const:
        break;
      case Op::MatVec: {
        Node& wn = nodes_[n.in0];
        Node& xn = nodes_[n.in1];
        const std::size_t m = wn.val.rows(), k = wn.val.cols();
        const double* g = n.grad.data();
        const double* W = wn.val.data();
        const double* x = xn.val.data();
        double* gW = wn.grad.data();
        double* gx = xn.grad.data();
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = g[i];
          const double* row = W + i * k;
          double* grow = gW + i * k;
          for (std::size_t j = 0; j < k; ++j) {
            grow[j] += gi * x[j];
            gx[j] += row[j] * gi;
          }
        }
        break;
      }
      case Op::Add:
        nodes_[n.in0].grad.add_inplace(n.grad);
        nodes_[n.in1].grad.add_inplace(n.grad);
        break;
      case Op::Mul: {
        Node& an = nodes_[n.in0];
        Node& bn = nodes_[n.in1];
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
          an.grad[i] += n.grad[i] * bn.val[i];
          bn.grad[i] += n.grad[i] * an.val[i];
        }
        break;
      }
      case Op::Concat: {
        std::size_t off = 0;
        for (NodeId part : n.ins) {
          Tensor& pg = nodes_[part].grad;
          for (std::size_t i = 0; i < pg.size(); ++i)
            pg[i] += n.grad[off + i];
          off += pg.size();
        }
        break;
      }
      case Op::Slice: {
        Tensor& ag = nodes_[n.in0].grad;
        for (std::size_t i = 0; i < n.grad.size(); ++i)
          ag[n.start + i] += n.grad[i];
        break;
      }
      case Op::Sigmoid: {
        Tensor& ag = nodes_[n.in0].grad;
        for (std::size_t i = 0; i < n.grad.size(); ++i)
          ag[i] += n.grad[i] * n.val[i] * (1.0 - n.val[i]);
        break;
      }
      case Op::Tanh: {
        Tensor& ag = nodes_[n.in0].grad;
        for (std::size_t i = 0; i < n.grad.size(); ++i)
          ag[i] += n.grad[i] * (1.0 - n.val[i] * n.val[i]);
        break;
      }
      case Op::Relu: {
        Node& an = nodes_[n.in0];
        for (std::size_t i = 0; i < n.grad.size(); ++i)
          if (an.val[i] > 0.0) an.grad[i] += n.grad[i];
        break;
      }
      case Op::Scale:
        for (std::size_t i = 0; i < n.grad.size(); ++i)
          nodes_[n.in0].grad[i] += n.grad[i] * n.factor;
        break;
      case Op::AddMany:
        for (NodeId term : n.ins) nodes_[term].grad.add_inplace(n.grad);
        break;
      case Op::BvnNll:
        bvn_nll_raw_grad(nodes_[n.in0].val.data(), n.tx, n.ty, n.grad[0],
                         nodes_[n.in0].grad.data());
        break;
    }
  }
}

}  // namespace gridpath::nn
