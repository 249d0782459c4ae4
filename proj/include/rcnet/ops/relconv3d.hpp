#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rcnet/ops/window.hpp"
#include "rcnet/tape.hpp"

namespace rcnet::ops {

/// How window weights are shared across channels. kPerChannel runs an
/// independent window softmax for every channel; kPerHead sums the exponent
/// over each head's channels and shares one weight per head (heads = 1 gives a
/// single scalar weight per window slot).
enum class RelWeighting { kPerChannel, kPerHead };

struct RelConvOptions {
  Dims3 window{3, 3, 3};
  Dims3 stride{1, 1, 1};
  Padding padding = Padding::kSame;
  RelWeighting weighting = RelWeighting::kPerChannel;
  std::size_t heads = 1;
};

/// Pointwise [C, C] maps producing query, key and value features.
template <typename T>
struct RelConvProjections {
  BasicTensor<T> query;
  BasicTensor<T> key;
  BasicTensor<T> value;

  static RelConvProjections identity(std::size_t channels);
};

template <typename T>
struct RelConvParams {
  RelConvOptions options;
  /// Absent means raw features serve as query, key and value.
  std::optional<RelConvProjections<T>> projections;
};

/// State retained by the forward pass for relconv3d_backward.
template <typename T>
struct RelConvContext {
  bool valid = false;
  RelConvOptions options;
  std::optional<RelConvProjections<T>> projections;
  WindowPlan plan;
  std::vector<std::size_t> gather;
  std::vector<std::size_t> centers;
  std::size_t groups = 0;
  BasicTensor<T> input;
  BasicTensor<T> query;
  BasicTensor<T> key;
  BasicTensor<T> value;
  /// Normalized window weights, [output positions, window size, groups].
  BasicTensor<T> weights;
};

template <typename T>
struct RelConvResult {
  BasicTensor<T> output;
  RelConvContext<T> context;
};

template <typename T>
struct RelConvGrads {
  BasicTensor<T> input;
  BasicTensor<T> query_weights;
  BasicTensor<T> key_weights;
  BasicTensor<T> value_weights;
};

/// Number of weight groups for `channels` under `options`.
std::size_t relconv_groups(const RelConvOptions& options, std::size_t channels);

/// Window weights for one output location. `query` is the centre feature
/// [C]; `keys` holds the window's key features [window, C]. Returns
/// [window, groups] with weight = exp(-(q + k)) / Norm, the exponent summed
/// over each group's channels. Max-shifted before exponentiation.
template <typename T>
std::vector<T> relational_weights(std::span<const T> query, std::span<const T> keys,
                                  std::size_t window, std::size_t channels,
                                  std::size_t groups);

/// Relational convolution over an [H, W, S, C] map: every output is the
/// weight-normalized sum of the window's value features, with weights set by
/// the window centre's query and each neighbour's key.
template <typename T>
RelConvResult<T> relconv3d_forward(const BasicTensor<T>& input, const RelConvParams<T>& p);

template <typename T>
BasicTensor<T> relconv3d(const BasicTensor<T>& input, const RelConvParams<T>& p) {
  return relconv3d_forward(input, p).output;
}

template <typename T>
RelConvGrads<T> relconv3d_backward(const RelConvContext<T>& context,
                                   const BasicTensor<T>& grad_out);

/// Effective per-channel kernel [k_h, k_w, k_s, C] the operator applies at
/// output location `position` (the dynamic kernel).
template <typename T>
BasicTensor<T> relconv3d_dynamic_kernel(const BasicTensor<T>& input,
                                        const RelConvParams<T>& p, Dims3 position);

}  // namespace rcnet::ops

namespace rcnet::ag {

/// `projections` holds query, key and value weight vars, in that order.
template <typename T>
Var relconv3d(Tape<T>& tape, Var input, const ops::RelConvOptions& options,
              std::optional<std::array<Var, 3>> projections);

}  // namespace rcnet::ag
