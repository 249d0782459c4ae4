#include "rcnet/ops/conv3d.hpp"

#include <string>

namespace rcnet::ops {

template <typename T>
Dims3 spatial_dims(const BasicTensor<T>& feature_map, const char* what) {
  if (feature_map.rank() != 4) {
    fail(ErrorCode::kShapeMismatch, std::string(what) + ": expected [H,W,S,C], got " +
                                        shape_to_string(feature_map.shape()));
  }
  return {feature_map.shape()[0], feature_map.shape()[1], feature_map.shape()[2]};
}

template <typename T>
void matmul_acc(const T* a, const T* b, T* out, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    T* row = out + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      const T* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) row[j] += av * brow[j];
    }
  }
}

template <typename T>
void matmul_at_b_acc(const T* a, const T* g, T* out, std::size_t n, std::size_t k,
                     std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const T* grow = g + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      T* orow = out + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * grow[j];
    }
  }
}

template <typename T>
void matmul_a_bt_acc(const T* g, const T* b, T* out, std::size_t n, std::size_t k,
                     std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const T* grow = g + i * m;
    T* orow = out + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = b + p * m;
      T acc{0};
      for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
      orow[p] += acc;
    }
  }
}

namespace {

template <typename T>
WindowPlan depthwise_plan(const BasicTensor<T>& input, const Conv3dParams<T>& p) {
  const Dims3 in = spatial_dims(input, "conv3d_depthwise");
  if (p.kernel.rank() != 4) {
    fail(ErrorCode::kShapeMismatch, "conv3d_depthwise: kernel must be [k_h,k_w,k_s,C]");
  }
  if (p.kernel.shape()[3] != input.shape()[3]) {
    fail(ErrorCode::kShapeMismatch,
         "conv3d_depthwise: kernel has " + std::to_string(p.kernel.shape()[3]) +
             " channels, input has " + std::to_string(input.shape()[3]));
  }
  return WindowPlan(in, {p.kernel.shape()[0], p.kernel.shape()[1], p.kernel.shape()[2]},
                    p.stride, p.padding);
}

}  // namespace

template <typename T>
BasicTensor<T> conv3d_depthwise(const BasicTensor<T>& input, const Conv3dParams<T>& p) {
  const WindowPlan plan = depthwise_plan(input, p);
  const std::size_t c_count = input.shape()[3];
  const std::size_t nw = plan.window_size();
  const auto gather = plan.gather_table();
  const Dims3& out_dims = plan.output();
  BasicTensor<T> out({out_dims[0], out_dims[1], out_dims[2], c_count});
  const T* x = input.data().data();
  const T* k = p.kernel.data().data();
  T* y = out.data().data();
  for (std::size_t o = 0; o < plan.output_positions(); ++o) {
    T* yrow = y + o * c_count;
    for (std::size_t w = 0; w < nw; ++w) {
      const T* xrow = x + gather[o * nw + w] * c_count;
      const T* krow = k + w * c_count;
      for (std::size_t c = 0; c < c_count; ++c) yrow[c] += xrow[c] * krow[c];
    }
  }
  return out;
}

template <typename T>
DepthwiseGrads<T> conv3d_depthwise_backward(const BasicTensor<T>& input,
                                            const Conv3dParams<T>& p,
                                            const BasicTensor<T>& grad_out) {
  const WindowPlan plan = depthwise_plan(input, p);
  const std::size_t c_count = input.shape()[3];
  const std::size_t nw = plan.window_size();
  const auto gather = plan.gather_table();
  DepthwiseGrads<T> grads{BasicTensor<T>(input.shape()), BasicTensor<T>(p.kernel.shape())};
  const T* x = input.data().data();
  const T* k = p.kernel.data().data();
  const T* g = grad_out.data().data();
  T* gx = grads.input.data().data();
  T* gk = grads.kernel.data().data();
  for (std::size_t o = 0; o < plan.output_positions(); ++o) {
    const T* grow = g + o * c_count;
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t src = gather[o * nw + w] * c_count;
      const T* krow = k + w * c_count;
      T* gkrow = gk + w * c_count;
      for (std::size_t c = 0; c < c_count; ++c) {
        gx[src + c] += grow[c] * krow[c];
        gkrow[c] += grow[c] * x[src + c];
      }
    }
  }
  return grads;
}

template <typename T>
BasicTensor<T> conv3d_pointwise(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                                const BasicTensor<T>* bias) {
  const Dims3 d = spatial_dims(input, "conv3d_pointwise");
  const std::size_t c_in = input.shape()[3];
  if (weights.rank() != 2 || weights.shape()[0] != c_in) {
    fail(ErrorCode::kShapeMismatch, "conv3d_pointwise: weights " +
                                        shape_to_string(weights.shape()) +
                                        " incompatible with " + std::to_string(c_in) +
                                        " input channels");
  }
  const std::size_t c_out = weights.shape()[1];
  if (bias != nullptr && (bias->rank() != 1 || bias->shape()[0] != c_out)) {
    fail(ErrorCode::kShapeMismatch, "conv3d_pointwise: bias must be [C_out]");
  }
  const std::size_t n = d[0] * d[1] * d[2];
  BasicTensor<T> out({d[0], d[1], d[2], c_out});
  if (bias != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(bias->data().begin(), bias->data().end(), out.data().begin() + i * c_out);
    }
  }
  matmul_acc(input.data().data(), weights.data().data(), out.data().data(), n, c_in, c_out);
  return out;
}

template <typename T>
PointwiseGrads<T> conv3d_pointwise_backward(const BasicTensor<T>& input,
                                            const BasicTensor<T>& weights,
                                            const BasicTensor<T>& grad_out, bool with_bias) {
  const std::size_t c_in = weights.shape()[0];
  const std::size_t c_out = weights.shape()[1];
  const std::size_t n = input.size() / c_in;
  PointwiseGrads<T> grads{BasicTensor<T>(input.shape()), BasicTensor<T>(weights.shape()), {}};
  matmul_a_bt_acc(grad_out.data().data(), weights.data().data(), grads.input.data().data(),
                  n, c_in, c_out);
  matmul_at_b_acc(input.data().data(), grad_out.data().data(), grads.weights.data().data(),
                  n, c_in, c_out);
  if (with_bias) {
    grads.bias = BasicTensor<T>({c_out});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c_out; ++j) grads.bias[j] += grad_out[i * c_out + j];
    }
  }
  return grads;
}

}  // namespace rcnet::ops

namespace rcnet::ag {

namespace {
template <typename T>
void accumulate(BasicTensor<T>& dst, const BasicTensor<T>& src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}
}  // namespace

template <typename T>
Var conv3d_depthwise(Tape<T>& tape, Var input, Var kernel, ops::Dims3 stride,
                     ops::Padding padding) {
  using TensorT = BasicTensor<T>;
  ops::Conv3dParams<T> p{tape.value(kernel), stride, padding};
  TensorT out = ops::conv3d_depthwise(tape.value(input), p);
  return tape.record(std::move(out), {input, kernel},
                     [input, kernel, stride, padding](Tape<T>& t, const TensorT& g) {
                       const ops::Conv3dParams<T> params{t.value(kernel), stride, padding};
                       auto grads = ops::conv3d_depthwise_backward(t.value(input), params, g);
                       if (t.requires_grad(input)) accumulate(t.grad_ref(input), grads.input);
                       if (t.requires_grad(kernel)) accumulate(t.grad_ref(kernel), grads.kernel);
                     });
}

template <typename T>
Var conv3d_pointwise(Tape<T>& tape, Var input, Var weights, std::optional<Var> bias) {
  using TensorT = BasicTensor<T>;
  TensorT out = ops::conv3d_pointwise(tape.value(input), tape.value(weights),
                                      bias ? &tape.value(*bias) : nullptr);
  auto fn = [input, weights, bias](Tape<T>& t, const TensorT& g) {
    auto grads = ops::conv3d_pointwise_backward(t.value(input), t.value(weights), g,
                                                bias.has_value());
    if (t.requires_grad(input)) accumulate(t.grad_ref(input), grads.input);
    if (t.requires_grad(weights)) accumulate(t.grad_ref(weights), grads.weights);
    if (bias && t.requires_grad(*bias)) accumulate(t.grad_ref(*bias), grads.bias);
  };
  if (bias) return tape.record(std::move(out), {input, weights, *bias}, fn);
  return tape.record(std::move(out), {input, weights}, fn);
}

}  // namespace rcnet::ag

namespace rcnet {

#define RCNET_INSTANTIATE(T)                                                               \
  template ops::Dims3 ops::spatial_dims<T>(const BasicTensor<T>&, const char*);            \
  template void ops::matmul_acc<T>(const T*, const T*, T*, std::size_t, std::size_t,       \
                                   std::size_t);                                            \
  template void ops::matmul_at_b_acc<T>(const T*, const T*, T*, std::size_t, std::size_t,  \
                                        std::size_t);                                       \
  template void ops::matmul_a_bt_acc<T>(const T*, const T*, T*, std::size_t, std::size_t,  \
                                        std::size_t);                                       \
  template BasicTensor<T> ops::conv3d_depthwise<T>(const BasicTensor<T>&,                  \
                                                   const ops::Conv3dParams<T>&);            \
  template ops::DepthwiseGrads<T> ops::conv3d_depthwise_backward<T>(                       \
      const BasicTensor<T>&, const ops::Conv3dParams<T>&, const BasicTensor<T>&);          \
  template BasicTensor<T> ops::conv3d_pointwise<T>(const BasicTensor<T>&,                  \
                                                   const BasicTensor<T>&,                  \
                                                   const BasicTensor<T>*);                 \
  template ops::PointwiseGrads<T> ops::conv3d_pointwise_backward<T>(                       \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&, bool);          \
  template Var ag::conv3d_depthwise<T>(Tape<T>&, Var, Var, ops::Dims3, ops::Padding);      \
  template Var ag::conv3d_pointwise<T>(Tape<T>&, Var, Var, std::optional<Var>);

RCNET_INSTANTIATE(float)
RCNET_INSTANTIATE(double)
#undef RCNET_INSTANTIATE

}  // namespace rcnet
