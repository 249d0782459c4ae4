#include "rcnet/ops/attention.hpp"

#include <algorithm>
#include <cmath>

#include "rcnet/ops/conv3d.hpp"

namespace rcnet::ops {
namespace {

template <typename T>
struct AttnForward {
  std::size_t n = 0, c = 0;
  std::vector<T> q, k, v, attn;  // attn is N x N row-stochastic
  BasicTensor<T> output;
};

template <typename T>
AttnForward<T> attention_forward(const BasicTensor<T>& input, const AttnParams<T>& p) {
  spatial_dims(input, "self_attention_global");
  AttnForward<T> f;
  f.c = input.shape()[3];
  f.n = input.size() / f.c;
  for (const BasicTensor<T>* w : {&p.query, &p.key, &p.value}) {
    if (w->shape() != Shape{f.c, f.c}) {
      fail(ErrorCode::kShapeMismatch, "self_attention_global: projections must be [C,C]");
    }
  }
  const std::size_t n = f.n, c = f.c;
  const T* x = input.data().data();
  f.q.assign(n * c, T{0});
  f.k.assign(n * c, T{0});
  f.v.assign(n * c, T{0});
  matmul_acc(x, p.query.data().data(), f.q.data(), n, c, c);
  matmul_acc(x, p.key.data().data(), f.k.data(), n, c, c);
  matmul_acc(x, p.value.data().data(), f.v.data(), n, c, c);

  const T scale = T{1} / std::sqrt(static_cast<T>(c));
  f.attn.assign(n * n, T{0});
  for (std::size_t i = 0; i < n; ++i) {
    T* row = f.attn.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      T s{0};
      for (std::size_t d = 0; d < c; ++d) s += f.q[i * c + d] * f.k[j * c + d];
      row[j] = s * scale;
      if (!std::isfinite(row[j])) {
        fail(ErrorCode::kNumeric, "self_attention_global: non-finite attention score");
      }
    }
    const T peak = *std::max_element(row, row + n);
    T norm{0};
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - peak);
      norm += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= norm;
  }
  f.output = BasicTensor<T>(input.shape());
  matmul_acc(f.attn.data(), f.v.data(), f.output.data().data(), n, n, c);
  return f;
}

}  // namespace

template <typename T>
BasicTensor<T> self_attention_global(const BasicTensor<T>& input, const AttnParams<T>& p) {
  return attention_forward(input, p).output;
}

template <typename T>
AttnGrads<T> self_attention_global_backward(const BasicTensor<T>& input,
                                            const AttnParams<T>& p,
                                            const BasicTensor<T>& grad_out) {
  const AttnForward<T> f = attention_forward(input, p);
  const std::size_t n = f.n, c = f.c;
  const T scale = T{1} / std::sqrt(static_cast<T>(c));
  const T* g = grad_out.data().data();

  std::vector<T> dq(n * c, T{0}), dk(n * c, T{0}), dv(n * c, T{0}), ds(n * n, T{0});
  matmul_at_b_acc(f.attn.data(), g, dv.data(), n, n, c);
  matmul_a_bt_acc(g, f.v.data(), ds.data(), n, n, c);  // ds holds dA for now
  for (std::size_t i = 0; i < n; ++i) {
    const T* a = f.attn.data() + i * n;
    T* row = ds.data() + i * n;
    T dot{0};
    for (std::size_t j = 0; j < n; ++j) dot += a[j] * row[j];
    for (std::size_t j = 0; j < n; ++j) row[j] = a[j] * (row[j] - dot) * scale;
  }
  matmul_acc(ds.data(), f.k.data(), dq.data(), n, n, c);
  matmul_at_b_acc(ds.data(), f.q.data(), dk.data(), n, n, c);

  AttnGrads<T> grads{BasicTensor<T>(input.shape()), BasicTensor<T>({c, c}),
                     BasicTensor<T>({c, c}), BasicTensor<T>({c, c})};
  const T* x = input.data().data();
  T* gx = grads.input.data().data();
  matmul_a_bt_acc(dq.data(), p.query.data().data(), gx, n, c, c);
  matmul_a_bt_acc(dk.data(), p.key.data().data(), gx, n, c, c);
  matmul_a_bt_acc(dv.data(), p.value.data().data(), gx, n, c, c);
  matmul_at_b_acc(x, dq.data(), grads.query_weights.data().data(), n, c, c);
  matmul_at_b_acc(x, dk.data(), grads.key_weights.data().data(), n, c, c);
  matmul_at_b_acc(x, dv.data(), grads.value_weights.data().data(), n, c, c);
  return grads;
}

}  // namespace rcnet::ops

namespace rcnet::ag {

template <typename T>
Var self_attention_global(Tape<T>& tape, Var input, std::array<Var, 3> projections) {
  using TensorT = BasicTensor<T>;
  TensorT out = ops::self_attention_global(
      tape.value(input), ops::AttnParams<T>{tape.value(projections[0]),
                                            tape.value(projections[1]),
                                            tape.value(projections[2])});
  return tape.record(
      std::move(out), {input, projections[0], projections[1], projections[2]},
      [input, projections](Tape<T>& t, const TensorT& g) {
        const ops::AttnParams<T> p{t.value(projections[0]), t.value(projections[1]),
                                   t.value(projections[2])};
        auto grads = ops::self_attention_global_backward(t.value(input), p, g);
        auto acc = [&t](Var v, const TensorT& src) {
          if (!t.requires_grad(v)) return;
          TensorT& dst = t.grad_ref(v);
          for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
        };
        acc(input, grads.input);
        acc(projections[0], grads.query_weights);
        acc(projections[1], grads.key_weights);
        acc(projections[2], grads.value_weights);
      });
}

}  // namespace rcnet::ag

namespace rcnet {

#define RCNET_INSTANTIATE(T)                                                             \
  template BasicTensor<T> ops::self_attention_global<T>(const BasicTensor<T>&,           \
                                                        const ops::AttnParams<T>&);      \
  template ops::AttnGrads<T> ops::self_attention_global_backward<T>(                     \
      const BasicTensor<T>&, const ops::AttnParams<T>&, const BasicTensor<T>&);          \
  template Var ag::self_attention_global<T>(Tape<T>&, Var, std::array<Var, 3>);

RCNET_INSTANTIATE(float)
RCNET_INSTANTIATE(double)
#undef RCNET_INSTANTIATE

}  // namespace rcnet
