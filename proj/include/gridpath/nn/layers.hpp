#pragma once

#include <utility>

#include "gridpath/nn/gaussian.hpp"
#include "gridpath/nn/param.hpp"
#include "gridpath/nn/rng.hpp"
#include "gridpath/nn/tape.hpp"
#include "gridpath/nn/tensor.hpp"

namespace gridpath::nn {

enum class Mode { Train, Eval };

struct LSTMState {
  NodeId h = 0;
  NodeId c = 0;
};

// One LSTM cell update on the tape. Gate rows of the stacked (4H) pre-
// activation are [input, forget, cell-candidate, output] in that order.
LSTMState tape_lstm_step(Tape& tape, LSTMCellParams& params, NodeId x,
                         NodeId h_prev, NodeId c_prev);

// ReLU(W x); the embedding has no bias term.
NodeId tape_embed_relu(Tape& tape, Parameter& w, NodeId x);

// sigmoid(W x + b).
NodeId tape_linear_sigmoid(Tape& tape, Parameter& w, Parameter& b, NodeId x);

// W x with no bias (the Gaussian head).
NodeId tape_linear(Tape& tape, Parameter& w, NodeId x);

// Inverted-dropout mask: entry is 0 with probability `rate`, else
// 1/(1-rate). Always consumes exactly `n` uniform draws.
Tensor make_dropout_mask(std::size_t n, double rate, RngStream& rng);

// --- Plain-tensor wrappers (each runs a throwaway tape, so the numbers are
// --- identical to the recorded versions).

std::pair<Tensor, Tensor> lstm_step(LSTMCellParams& params, const Tensor& x,
                                    const Tensor& h_prev,
                                    const Tensor& c_prev);

Tensor embed_relu(Parameter& w, const Tensor& x);

Tensor linear_sigmoid(Parameter& w, Parameter& b, const Tensor& x);

Gauss2D gaussian_head(Parameter& w_of, const Tensor& h);

// Eval mode is the exact identity. Train mode applies an inverted-dropout
// mask drawn from `rng`.
Tensor dropout(const Tensor& x, double rate, Mode mode, RngStream& rng);

}  // namespace gridpath::nn
