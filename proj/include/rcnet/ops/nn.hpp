#pragma once

#include <span>
#include <vector>

#include "rcnet/tape.hpp"

namespace rcnet::ops {

/// Mean over H*W*S per channel: [H,W,S,C] -> [C].
template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input);

/// Mean negative log-softmax of the true class. Labels are 1-based.
template <typename T>
T softmax_cross_entropy(const BasicTensor<T>& logits, std::span<const int> labels);

/// d(loss)/d(logits) for softmax_cross_entropy.
template <typename T>
BasicTensor<T> softmax_cross_entropy_grad(const BasicTensor<T>& logits,
                                          std::span<const int> labels);

/// Per-channel standardization over the spatial-spectral extent of an
/// [H,W,S,C] map: (x - mean) / sqrt(var + eps).
template <typename T>
BasicTensor<T> channel_standardize(const BasicTensor<T>& input, T eps);

}  // namespace rcnet::ops

namespace rcnet::ag {

template <typename T>
Var global_avg_pool(Tape<T>& tape, Var input);

/// Scalar [1] loss.
template <typename T>
Var softmax_cross_entropy(Tape<T>& tape, Var logits, std::vector<int> labels);

template <typename T>
Var channel_standardize(Tape<T>& tape, Var input, T eps = T(1e-5));

}  // namespace rcnet::ag
