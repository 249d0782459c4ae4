#pragma once

#include <optional>

#include "rcnet/ops/window.hpp"
#include "rcnet/tape.hpp"

namespace rcnet::ops {

/// Static depthwise kernel [k_h, k_w, k_s, C] with its sliding geometry.
template <typename T>
struct Conv3dParams {
  BasicTensor<T> kernel;
  Dims3 stride{1, 1, 1};
  Padding padding = Padding::kSame;
};

/// O(i,j,l,c) = sum over the window of I(i+m, j+n, l+z, c) * K(m,n,z,c).
/// Input layout [H, W, S, C].
template <typename T>
BasicTensor<T> conv3d_depthwise(const BasicTensor<T>& input, const Conv3dParams<T>& p);

template <typename T>
struct DepthwiseGrads {
  BasicTensor<T> input;
  BasicTensor<T> kernel;
};

template <typename T>
DepthwiseGrads<T> conv3d_depthwise_backward(const BasicTensor<T>& input,
                                            const Conv3dParams<T>& p,
                                            const BasicTensor<T>& grad_out);

/// Per-location affine channel map: [H,W,S,C_in] x [C_in,C_out] + bias[C_out].
template <typename T>
BasicTensor<T> conv3d_pointwise(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                                const BasicTensor<T>* bias = nullptr);

template <typename T>
struct PointwiseGrads {
  BasicTensor<T> input;
  BasicTensor<T> weights;
  BasicTensor<T> bias;
};

template <typename T>
PointwiseGrads<T> conv3d_pointwise_backward(const BasicTensor<T>& input,
                                            const BasicTensor<T>& weights,
                                            const BasicTensor<T>& grad_out, bool with_bias);

/// Checks rank 4 and returns {H, W, S}.
template <typename T>
Dims3 spatial_dims(const BasicTensor<T>& feature_map, const char* what);

// Row-major [n, k] x [k, m] products used by pointwise maps and projections.
template <typename T>
void matmul_acc(const T* a, const T* b, T* out, std::size_t n, std::size_t k, std::size_t m);
template <typename T>
void matmul_at_b_acc(const T* a, const T* g, T* out, std::size_t n, std::size_t k,
                     std::size_t m);
template <typename T>
void matmul_a_bt_acc(const T* g, const T* b, T* out, std::size_t n, std::size_t k,
                     std::size_t m);

}  // namespace rcnet::ops

namespace rcnet::ag {

template <typename T>
Var conv3d_depthwise(Tape<T>& tape, Var input, Var kernel, ops::Dims3 stride = {1, 1, 1},
                     ops::Padding padding = ops::Padding::kSame);

template <typename T>
Var conv3d_pointwise(Tape<T>& tape, Var input, Var weights,
                     std::optional<Var> bias = std::nullopt);

}  // namespace rcnet::ag
