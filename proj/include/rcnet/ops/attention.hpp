#pragma once

#include <array>

#include "rcnet/tape.hpp"

namespace rcnet::ops {

/// Single-head global self-attention weights; d_k equals the channel count.
template <typename T>
struct AttnParams {
  BasicTensor<T> query;
  BasicTensor<T> key;
  BasicTensor<T> value;
};

template <typename T>
struct AttnGrads {
  BasicTensor<T> input;
  BasicTensor<T> query_weights;
  BasicTensor<T> key_weights;
  BasicTensor<T> value_weights;
};

/// Flattens [H,W,S,C] to N x C tokens and returns softmax(Q K^T / sqrt(C)) V
/// in the input layout. Reference operator for tests and complexity
/// comparisons; the network never uses it.
template <typename T>
BasicTensor<T> self_attention_global(const BasicTensor<T>& input, const AttnParams<T>& p);

template <typename T>
AttnGrads<T> self_attention_global_backward(const BasicTensor<T>& input,
                                            const AttnParams<T>& p,
                                            const BasicTensor<T>& grad_out);

}  // namespace rcnet::ops

namespace rcnet::ag {

template <typename T>
Var self_attention_global(Tape<T>& tape, Var input, std::array<Var, 3> projections);

}  // namespace rcnet::ag
