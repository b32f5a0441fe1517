#include "gridpath/nn/layers.hpp"

namespace gridpath::nn {

LSTMState tape_lstm_step(Tape& tape, LSTMCellParams& params, NodeId x,
                         NodeId h_prev, NodeId c_prev) {
  const std::size_t hidden = params.hidden_dim();
  NodeId z = tape.add(
      tape.add(tape.matvec(tape.leaf(params.w_in), x),
               tape.matvec(tape.leaf(params.w_rec), h_prev)),
      tape.leaf(params.bias));
  NodeId gi = tape.sigmoid(tape.slice(z, 0, hidden));
  NodeId gf = tape.sigmoid(tape.slice(z, hidden, hidden));
  NodeId gg = tape.tanh(tape.slice(z, 2 * hidden, hidden));
  NodeId go = tape.sigmoid(tape.slice(z, 3 * hidden, hidden));
  NodeId c = tape.add(tape.mul(gf, c_prev), tape.mul(gi, gg));
  NodeId h = tape.mul(go, tape.tanh(c));
  return {h, c};
}

NodeId tape_embed_relu(Tape& tape, Parameter& w, NodeId x) {
  return tape.relu(tape.matvec(tape.leaf(w), x));
}

NodeId tape_linear_sigmoid(Tape& tape, Parameter& w, Parameter& b, NodeId x) {
  return tape.sigmoid(
      tape.add(tape.matvec(tape.leaf(w), x), tape.leaf(b)));
}

NodeId tape_linear(Tape& tape, Parameter& w, NodeId x) {
  return tape.matvec(tape.leaf(w), x);
}

Tensor make_dropout_mask(std::size_t n, double rate, RngStream& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InvariantError("dropout: rate must lie in [0, 1)");
  Tensor mask = Tensor::zeros({n});
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < n; ++i)
    mask[i] = rng.uniform01() < rate ? 0.0 : keep_scale;
  return mask;
}

std::pair<Tensor, Tensor> lstm_step(LSTMCellParams& params, const Tensor& x,
                                    const Tensor& h_prev,
                                    const Tensor& c_prev) {
  Tape tape;
  LSTMState out = tape_lstm_step(tape, params, tape.constant(x),
                                 tape.constant(h_prev), tape.constant(c_prev));
  return {tape.val(out.h), tape.val(out.c)};
}

Tensor embed_relu(Parameter& w, const Tensor& x) {
  Tape tape;
  return tape.val(tape_embed_relu(tape, w, tape.constant(x)));
}

Tensor linear_sigmoid(Parameter& w, Parameter& b, const Tensor& x) {
  Tape tape;
  return tape.val(tape_linear_sigmoid(tape, w, b, tape.constant(x)));
}

Gauss2D gaussian_head(Parameter& w_of, const Tensor& h) {
  Tape tape;
  return gauss_from_raw(tape.val(tape_linear(tape, w_of, tape.constant(h))));
}

Tensor dropout(const Tensor& x, double rate, Mode mode, RngStream& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InvariantError("dropout: rate must lie in [0, 1)");
  if (mode == Mode::Eval) return x;
  Tensor mask = make_dropout_mask(x.size(), rate, rng);
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

}  // namespace gridpath::nn
