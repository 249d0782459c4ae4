#include "rcnet/autograd.hpp"

#include <cmath>

namespace rcnet::ag {

template <typename T>
Var elementwise(Tape<T>& tape, Elementwise op, Var a, std::optional<Var> b) {
  using TensorT = BasicTensor<T>;
  const bool binary =
      op == Elementwise::kAdd || op == Elementwise::kSub || op == Elementwise::kMul;
  if (binary != b.has_value()) {
    fail(ErrorCode::kInvalidArgument, "elementwise: wrong operand count");
  }
  const TensorT& x = tape.value(a);
  TensorT out(x.shape());
  const std::size_t n = x.size();
  if (binary) {
    const TensorT& y = tape.value(*b);
    require_same_shape(x, y, "elementwise");
    for (std::size_t i = 0; i < n; ++i) {
      switch (op) {
        case Elementwise::kAdd: out[i] = x[i] + y[i]; break;
        case Elementwise::kSub: out[i] = x[i] - y[i]; break;
        default: out[i] = x[i] * y[i]; break;
      }
    }
    const Var bv = *b;
    return tape.record(std::move(out), {a, bv}, [a, bv, op](Tape<T>& t, const TensorT& g) {
      const std::size_t m = g.size();
      if (t.requires_grad(a)) {
        TensorT& ga = t.grad_ref(a);
        const TensorT& y = t.value(bv);
        for (std::size_t i = 0; i < m; ++i) ga[i] += op == Elementwise::kMul ? g[i] * y[i] : g[i];
      }
      if (t.requires_grad(bv)) {
        TensorT& gb = t.grad_ref(bv);
        const TensorT& x = t.value(a);
        for (std::size_t i = 0; i < m; ++i) {
          switch (op) {
            case Elementwise::kAdd: gb[i] += g[i]; break;
            case Elementwise::kSub: gb[i] -= g[i]; break;
            default: gb[i] += g[i] * x[i]; break;
          }
        }
      }
    });
  }
  if (op == Elementwise::kExp) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
    const Var result{static_cast<std::uint32_t>(tape.size())};
    return tape.record(std::move(out), {a}, [a, result](Tape<T>& t, const TensorT& g) {
      TensorT& ga = t.grad_ref(a);
      const TensorT& y = t.value(result);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    });
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = -x[i];
  return tape.record(std::move(out), {a}, [a](Tape<T>& t, const TensorT& g) {
    TensorT& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
  });
}

template <typename T>
Var reduce_sum(Tape<T>& tape, Var a, std::size_t axis) {
  using TensorT = BasicTensor<T>;
  const TensorT& x = tape.value(a);
  if (axis >= x.rank()) {
    fail(ErrorCode::kAxisOutOfRange, "reduce_sum: axis " + std::to_string(axis) +
                                         " out of range for rank " +
                                         std::to_string(x.rank()));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= x.shape()[i];
  for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.shape()[i];
  const std::size_t extent = x.shape()[axis];
  Shape out_shape;
  for (std::size_t i = 0; i < x.rank(); ++i) {
    if (i != axis) out_shape.push_back(x.shape()[i]);
  }
  if (out_shape.empty()) out_shape.push_back(1);
  TensorT out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t e = 0; e < extent; ++e) {
      const T* src = x.data().data() + (o * extent + e) * inner;
      T* dst = out.data().data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  return tape.record(std::move(out), {a},
                     [a, outer, extent, inner](Tape<T>& t, const TensorT& g) {
                       TensorT& ga = t.grad_ref(a);
                       for (std::size_t o = 0; o < outer; ++o) {
                         for (std::size_t e = 0; e < extent; ++e) {
                           T* dst = ga.data().data() + (o * extent + e) * inner;
                           const T* src = g.data().data() + o * inner;
                           for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
                         }
                       }
                     });
}

template <typename T>
Var sum_all(Tape<T>& tape, Var a) {
  using TensorT = BasicTensor<T>;
  const TensorT& x = tape.value(a);
  T total{0};
  for (T v : x.data()) total += v;
  return tape.record(TensorT({1}, total), {a}, [a](Tape<T>& t, const TensorT& g) {
    TensorT& ga = t.grad_ref(a);
    for (T& v : ga.data()) v += g[0];
  });
}

template <typename T>
Var reshape(Tape<T>& tape, Var a, Shape shape) {
  using TensorT = BasicTensor<T>;
  TensorT out = tape.value(a).reshaped(std::move(shape));
  return tape.record(std::move(out), {a}, [a](Tape<T>& t, const TensorT& g) {
    TensorT& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

template <typename T>
Var expand(Tape<T>& tape, Var a, const Shape& leading) {
  using TensorT = BasicTensor<T>;
  const TensorT& x = tape.value(a);
  Shape shape = leading;
  shape.insert(shape.end(), x.shape().begin(), x.shape().end());
  TensorT out(shape);
  const std::size_t copies = shape_size(leading);
  const std::size_t n = x.size();
  for (std::size_t r = 0; r < copies; ++r) {
    std::copy(x.data().begin(), x.data().end(), out.data().begin() + r * n);
  }
  return tape.record(std::move(out), {a}, [a, copies, n](Tape<T>& t, const TensorT& g) {
    TensorT& ga = t.grad_ref(a);
    for (std::size_t r = 0; r < copies; ++r) {
      for (std::size_t i = 0; i < n; ++i) ga[i] += g[r * n + i];
    }
  });
}

template <typename T>
Var stack(Tape<T>& tape, std::span<const Var> items) {
  using TensorT = BasicTensor<T>;
  if (items.empty()) fail(ErrorCode::kInvalidArgument, "stack: no inputs");
  const Shape& item_shape = tape.value(items[0]).shape();
  Shape shape{items.size()};
  shape.insert(shape.end(), item_shape.begin(), item_shape.end());
  TensorT out(shape);
  const std::size_t n = shape_size(item_shape);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const TensorT& x = tape.value(items[k]);
    require_same_shape(x, tape.value(items[0]), "stack");
    std::copy(x.data().begin(), x.data().end(), out.data().begin() + k * n);
  }
  std::vector<Var> inputs(items.begin(), items.end());
  return tape.record(std::move(out), items,
                     [inputs, n](Tape<T>& t, const TensorT& g) {
                       for (std::size_t k = 0; k < inputs.size(); ++k) {
                         if (!t.requires_grad(inputs[k])) continue;
                         TensorT& gk = t.grad_ref(inputs[k]);
                         for (std::size_t i = 0; i < n; ++i) gk[i] += g[k * n + i];
                       }
                     });
}

template <typename T>
Var silu(Tape<T>& tape, Var a) {
  using TensorT = BasicTensor<T>;
  const TensorT& x = tape.value(a);
  TensorT out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] / (T{1} + std::exp(-x[i]));
  }
  return tape.record(std::move(out), {a}, [a](Tape<T>& t, const TensorT& g) {
    const TensorT& x = t.value(a);
    TensorT& ga = t.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const T s = T{1} / (T{1} + std::exp(-x[i]));
      ga[i] += g[i] * s * (T{1} + x[i] * (T{1} - s));
    }
  });
}

#define RCNET_INSTANTIATE(T)                                                        \
  template Var elementwise<T>(Tape<T>&, Elementwise, Var, std::optional<Var>);      \
  template Var reduce_sum<T>(Tape<T>&, Var, std::size_t);                           \
  template Var sum_all<T>(Tape<T>&, Var);                                           \
  template Var reshape<T>(Tape<T>&, Var, Shape);                                    \
  template Var expand<T>(Tape<T>&, Var, const Shape&);                              \
  template Var stack<T>(Tape<T>&, std::span<const Var>);                            \
  template Var silu<T>(Tape<T>&, Var);

RCNET_INSTANTIATE(float)
RCNET_INSTANTIATE(double)
#undef RCNET_INSTANTIATE

}  // namespace rcnet::ag
