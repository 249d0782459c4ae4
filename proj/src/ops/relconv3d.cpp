#include "rcnet/ops/relconv3d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcnet/ops/conv3d.hpp"

namespace rcnet::ops {

std::size_t relconv_groups(const RelConvOptions& options, std::size_t channels) {
  if (options.weighting == RelWeighting::kPerChannel) return channels;
  require(options.heads >= 1, ErrorCode::kInvalidArgument, "relconv3d: heads must be >= 1");
  if (channels % options.heads != 0) {
    fail(ErrorCode::kInvalidArgument, "relconv3d: " + std::to_string(channels) +
                                          " channels not divisible by " +
                                          std::to_string(options.heads) + " heads");
  }
  return options.heads;
}

template <typename T>
RelConvProjections<T> RelConvProjections<T>::identity(std::size_t channels) {
  BasicTensor<T> eye({channels, channels});
  for (std::size_t c = 0; c < channels; ++c) eye[c * channels + c] = T{1};
  return {eye, eye, eye};
}

template <typename T>
std::vector<T> relational_weights(std::span<const T> query, std::span<const T> keys,
                                  std::size_t window, std::size_t channels,
                                  std::size_t groups) {
  const std::size_t group_size = channels / groups;
  std::vector<T> e(window * groups, T{0});
  for (std::size_t w = 0; w < window; ++w) {
    const T* k = keys.data() + w * channels;
    for (std::size_t c = 0; c < channels; ++c) e[w * groups + c / group_size] -= query[c] + k[c];
  }
  for (std::size_t g = 0; g < groups; ++g) {
    T peak = e[g];
    for (std::size_t w = 1; w < window; ++w) peak = std::max(peak, e[w * groups + g]);
    T norm{0};
    for (std::size_t w = 0; w < window; ++w) {
      T& v = e[w * groups + g];
      v = std::exp(v - peak);
      norm += v;
    }
    for (std::size_t w = 0; w < window; ++w) e[w * groups + g] /= norm;
  }
  return e;
}

namespace {

template <typename T>
void validate(const BasicTensor<T>& input, const RelConvParams<T>& p) {
  spatial_dims(input, "relconv3d");
  for (std::size_t a = 0; a < 3; ++a) {
    if (p.options.window[a] % 2 == 0) {
      fail(ErrorCode::kInvalidArgument, "relconv3d: window extents must be odd");
    }
  }
  const std::size_t c = input.shape()[3];
  if (p.projections) {
    for (const BasicTensor<T>* w :
         {&p.projections->query, &p.projections->key, &p.projections->value}) {
      if (w->shape() != Shape{c, c}) {
        fail(ErrorCode::kShapeMismatch, "relconv3d: projection " +
                                            shape_to_string(w->shape()) +
                                            " must be [C,C] with C = " + std::to_string(c));
      }
    }
  }
}

template <typename T>
BasicTensor<T> project(const BasicTensor<T>& x, const BasicTensor<T>& w) {
  BasicTensor<T> out(x.shape());
  const std::size_t c = x.shape()[3];
  matmul_acc(x.data().data(), w.data().data(), out.data().data(), x.size() / c, c, c);
  return out;
}

}  // namespace

template <typename T>
RelConvResult<T> relconv3d_forward(const BasicTensor<T>& input, const RelConvParams<T>& p) {
  validate(input, p);
  const std::size_t channels = input.shape()[3];
  RelConvResult<T> r;
  RelConvContext<T>& ctx = r.context;
  ctx.options = p.options;
  ctx.projections = p.projections;
  ctx.groups = relconv_groups(p.options, channels);
  ctx.plan = WindowPlan({input.shape()[0], input.shape()[1], input.shape()[2]},
                        p.options.window, p.options.stride, p.options.padding);
  ctx.gather = ctx.plan.gather_table();
  ctx.centers = ctx.plan.center_table();
  ctx.input = input;
  if (p.projections) {
    ctx.query = project(input, p.projections->query);
    ctx.key = project(input, p.projections->key);
    ctx.value = project(input, p.projections->value);
  } else {
    ctx.query = ctx.key = ctx.value = input;
  }

  const std::size_t nw = ctx.plan.window_size();
  const std::size_t n_out = ctx.plan.output_positions();
  const std::size_t groups = ctx.groups;
  const std::size_t group_size = channels / groups;
  const Dims3& od = ctx.plan.output();
  r.output = BasicTensor<T>({od[0], od[1], od[2], channels});
  ctx.weights = BasicTensor<T>({n_out, nw, groups});

  std::vector<T> keys(nw * channels);
  for (std::size_t o = 0; o < n_out; ++o) {
    for (std::size_t w = 0; w < nw; ++w) {
      const T* src = ctx.key.data().data() + ctx.gather[o * nw + w] * channels;
      std::copy(src, src + channels, keys.begin() + w * channels);
    }
    const std::span<const T> q(ctx.query.data().data() + ctx.centers[o] * channels, channels);
    const std::vector<T> a = relational_weights<T>(q, keys, nw, channels, groups);
    std::copy(a.begin(), a.end(), ctx.weights.data().begin() + o * nw * groups);
    T* y = r.output.data().data() + o * channels;
    for (std::size_t w = 0; w < nw; ++w) {
      const T* v = ctx.value.data().data() + ctx.gather[o * nw + w] * channels;
      const T* aw = a.data() + w * groups;
      for (std::size_t c = 0; c < channels; ++c) y[c] += aw[c / group_size] * v[c];
    }
  }
  ctx.valid = true;
  return r;
}

template <typename T>
RelConvGrads<T> relconv3d_backward(const RelConvContext<T>& ctx,
                                   const BasicTensor<T>& grad_out) {
  if (!ctx.valid) fail(ErrorCode::kInvalidArgument, "relconv3d_backward: missing forward context");
  const std::size_t channels = ctx.input.shape()[3];
  const std::size_t nw = ctx.plan.window_size();
  const std::size_t n_out = ctx.plan.output_positions();
  const std::size_t groups = ctx.groups;
  const std::size_t group_size = channels / groups;
  if (grad_out.size() != n_out * channels) {
    fail(ErrorCode::kShapeMismatch, "relconv3d_backward: upstream gradient shape " +
                                        shape_to_string(grad_out.shape()));
  }

  BasicTensor<T> dq(ctx.input.shape()), dk(ctx.input.shape()), dv(ctx.input.shape());
  std::vector<T> da(nw * groups), de(nw * groups);
  for (std::size_t o = 0; o < n_out; ++o) {
    const T* g = grad_out.data().data() + o * channels;
    const T* a = ctx.weights.data().data() + o * nw * groups;
    std::fill(da.begin(), da.end(), T{0});
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t src = ctx.gather[o * nw + w] * channels;
      const T* v = ctx.value.data().data() + src;
      T* gv = dv.data().data() + src;
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t grp = c / group_size;
        gv[c] += a[w * groups + grp] * g[c];
        da[w * groups + grp] += g[c] * v[c];
      }
    }
    // Softmax Jacobian over the window for each group; d(exponent)/d(q, k) = -1.
    for (std::size_t grp = 0; grp < groups; ++grp) {
      T dot{0};
      for (std::size_t w = 0; w < nw; ++w) dot += a[w * groups + grp] * da[w * groups + grp];
      for (std::size_t w = 0; w < nw; ++w) {
        de[w * groups + grp] = a[w * groups + grp] * (da[w * groups + grp] - dot);
      }
    }
    T* gq = dq.data().data() + ctx.centers[o] * channels;
    for (std::size_t w = 0; w < nw; ++w) {
      T* gk = dk.data().data() + ctx.gather[o * nw + w] * channels;
      for (std::size_t c = 0; c < channels; ++c) {
        const T d = de[w * groups + c / group_size];
        gk[c] -= d;
        gq[c] -= d;
      }
    }
  }

  RelConvGrads<T> grads;
  grads.input = BasicTensor<T>(ctx.input.shape());
  const std::size_t n = ctx.input.size() / channels;
  if (ctx.projections) {
    const auto& pr = *ctx.projections;
    T* gx = grads.input.data().data();
    matmul_a_bt_acc(dq.data().data(), pr.query.data().data(), gx, n, channels, channels);
    matmul_a_bt_acc(dk.data().data(), pr.key.data().data(), gx, n, channels, channels);
    matmul_a_bt_acc(dv.data().data(), pr.value.data().data(), gx, n, channels, channels);
    const T* x = ctx.input.data().data();
    grads.query_weights = BasicTensor<T>({channels, channels});
    grads.key_weights = BasicTensor<T>({channels, channels});
    grads.value_weights = BasicTensor<T>({channels, channels});
    matmul_at_b_acc(x, dq.data().data(), grads.query_weights.data().data(), n, channels, channels);
    matmul_at_b_acc(x, dk.data().data(), grads.key_weights.data().data(), n, channels, channels);
    matmul_at_b_acc(x, dv.data().data(), grads.value_weights.data().data(), n, channels, channels);
  } else {
    for (std::size_t i = 0; i < grads.input.size(); ++i) grads.input[i] = dq[i] + dk[i] + dv[i];
  }
  return grads;
}

template <typename T>
BasicTensor<T> relconv3d_dynamic_kernel(const BasicTensor<T>& input,
                                        const RelConvParams<T>& p, Dims3 position) {
  const RelConvResult<T> r = relconv3d_forward(input, p);
  const RelConvContext<T>& ctx = r.context;
  const Dims3& od = ctx.plan.output();
  for (std::size_t a = 0; a < 3; ++a) {
    if (position[a] >= od[a]) {
      fail(ErrorCode::kAxisOutOfRange, "relconv3d_dynamic_kernel: position outside output");
    }
  }
  const std::size_t o = (position[0] * od[1] + position[1]) * od[2] + position[2];
  const std::size_t channels = input.shape()[3];
  const std::size_t nw = ctx.plan.window_size();
  const std::size_t group_size = channels / ctx.groups;
  const Dims3& win = ctx.plan.window();
  BasicTensor<T> kernel({win[0], win[1], win[2], channels});
  const T* a = ctx.weights.data().data() + o * nw * ctx.groups;
  for (std::size_t w = 0; w < nw; ++w) {
    for (std::size_t c = 0; c < channels; ++c) {
      kernel[w * channels + c] = a[w * ctx.groups + c / group_size];
    }
  }
  return kernel;
}

}  // namespace rcnet::ops

namespace rcnet::ag {

template <typename T>
Var relconv3d(Tape<T>& tape, Var input, const ops::RelConvOptions& options,
              std::optional<std::array<Var, 3>> projections) {
  using TensorT = BasicTensor<T>;
  ops::RelConvParams<T> params{options, std::nullopt};
  if (projections) {
    params.projections = ops::RelConvProjections<T>{tape.value((*projections)[0]),
                                                    tape.value((*projections)[1]),
                                                    tape.value((*projections)[2])};
  }
  auto result = ops::relconv3d_forward(tape.value(input), params);
  auto ctx = std::make_shared<ops::RelConvContext<T>>(std::move(result.context));
  auto fn = [ctx, input, projections](Tape<T>& t, const TensorT& g) {
    auto grads = ops::relconv3d_backward(*ctx, g);
    auto acc = [&t](Var v, const TensorT& src) {
      if (!t.requires_grad(v)) return;
      TensorT& dst = t.grad_ref(v);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
    };
    acc(input, grads.input);
    if (projections) {
      acc((*projections)[0], grads.query_weights);
      acc((*projections)[1], grads.key_weights);
      acc((*projections)[2], grads.value_weights);
    }
  };
  if (projections) {
    const auto& pv = *projections;
    return tape.record(std::move(result.output), {input, pv[0], pv[1], pv[2]}, fn);
  }
  return tape.record(std::move(result.output), {input}, fn);
}

}  // namespace rcnet::ag

namespace rcnet {

#define RCNET_INSTANTIATE(T)                                                               \
  template struct ops::RelConvProjections<T>;                                              \
  template std::vector<T> ops::relational_weights<T>(std::span<const T>, std::span<const T>, \
                                                     std::size_t, std::size_t, std::size_t); \
  template ops::RelConvResult<T> ops::relconv3d_forward<T>(const BasicTensor<T>&,          \
                                                           const ops::RelConvParams<T>&);  \
  template ops::RelConvGrads<T> ops::relconv3d_backward<T>(const ops::RelConvContext<T>&,  \
                                                           const BasicTensor<T>&);         \
  template BasicTensor<T> ops::relconv3d_dynamic_kernel<T>(                                \
      const BasicTensor<T>&, const ops::RelConvParams<T>&, ops::Dims3);                    \
  template Var ag::relconv3d<T>(Tape<T>&, Var, const ops::RelConvOptions&,                 \
                                std::optional<std::array<Var, 3>>);

RCNET_INSTANTIATE(float)
RCNET_INSTANTIATE(double)
#undef RCNET_INSTANTIATE

}  // namespace rcnet
