#include "rcnet/ops/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcnet/ops/conv3d.hpp"

namespace rcnet::ops {

template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input) {
  spatial_dims(input, "global_avg_pool");
  const std::size_t c = input.shape()[3];
  const std::size_t n = input.size() / c;
  BasicTensor<T> out({c});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j] += input[i * c + j];
  }
  for (std::size_t j = 0; j < c; ++j) out[j] /= static_cast<T>(n);
  return out;
}

namespace {

template <typename T>
void check_logits(const BasicTensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.shape()[0] != labels.size()) {
    fail(ErrorCode::kShapeMismatch, "softmax_cross_entropy: logits " +
                                        shape_to_string(logits.shape()) + " vs " +
                                        std::to_string(labels.size()) + " labels");
  }
  const int k = static_cast<int>(logits.shape()[1]);
  for (int label : labels) {
    if (label < 1 || label > k) {
      fail(ErrorCode::kInvalidArgument, "softmax_cross_entropy: label " +
                                            std::to_string(label) + " outside 1.." +
                                            std::to_string(k));
    }
  }
}

}  // namespace

template <typename T>
T softmax_cross_entropy(const BasicTensor<T>& logits, std::span<const int> labels) {
  check_logits(logits, labels);
  const std::size_t b = logits.shape()[0], k = logits.shape()[1];
  T total{0};
  for (std::size_t i = 0; i < b; ++i) {
    const T* row = logits.data().data() + i * k;
    const T peak = *std::max_element(row, row + k);
    T norm{0};
    for (std::size_t j = 0; j < k; ++j) norm += std::exp(row[j] - peak);
    total += std::log(norm) + peak - row[labels[i] - 1];
  }
  return total / static_cast<T>(b);
}

template <typename T>
BasicTensor<T> softmax_cross_entropy_grad(const BasicTensor<T>& logits,
                                          std::span<const int> labels) {
  check_logits(logits, labels);
  const std::size_t b = logits.shape()[0], k = logits.shape()[1];
  BasicTensor<T> grad(logits.shape());
  for (std::size_t i = 0; i < b; ++i) {
    const T* row = logits.data().data() + i * k;
    T* out = grad.data().data() + i * k;
    const T peak = *std::max_element(row, row + k);
    T norm{0};
    for (std::size_t j = 0; j < k; ++j) norm += (out[j] = std::exp(row[j] - peak));
    for (std::size_t j = 0; j < k; ++j) out[j] /= norm * static_cast<T>(b);
    out[labels[i] - 1] -= T{1} / static_cast<T>(b);
  }
  return grad;
}

template <typename T>
BasicTensor<T> channel_standardize(const BasicTensor<T>& input, T eps) {
  spatial_dims(input, "channel_standardize");
  const std::size_t c = input.shape()[3];
  const std::size_t n = input.size() / c;
  std::vector<T> mean(c, T{0}), var(c, T{0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) mean[j] += input[i * c + j];
  }
  for (T& m : mean) m /= static_cast<T>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const T d = input[i * c + j] - mean[j];
      var[j] += d * d;
    }
  }
  BasicTensor<T> out(input.shape());
  for (std::size_t j = 0; j < c; ++j) var[j] = T{1} / std::sqrt(var[j] / static_cast<T>(n) + eps);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = (input[i * c + j] - mean[j]) * var[j];
  }
  return out;
}

}  // namespace rcnet::ops

namespace rcnet::ag {

template <typename T>
Var global_avg_pool(Tape<T>& tape, Var input) {
  using TensorT = BasicTensor<T>;
  TensorT out = ops::global_avg_pool(tape.value(input));
  return tape.record(std::move(out), {input}, [input](Tape<T>& t, const TensorT& g) {
    TensorT& gx = t.grad_ref(input);
    const std::size_t c = g.size();
    const std::size_t n = gx.size() / c;
    const T inv = T{1} / static_cast<T>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += g[j] * inv;
    }
  });
}

template <typename T>
Var softmax_cross_entropy(Tape<T>& tape, Var logits, std::vector<int> labels) {
  using TensorT = BasicTensor<T>;
  const T loss = ops::softmax_cross_entropy<T>(tape.value(logits), labels);
  return tape.record(TensorT({1}, loss), {logits},
                     [logits, labels = std::move(labels)](Tape<T>& t, const TensorT& g) {
                       const TensorT grad =
                           ops::softmax_cross_entropy_grad<T>(t.value(logits), labels);
                       TensorT& gl = t.grad_ref(logits);
                       for (std::size_t i = 0; i < grad.size(); ++i) gl[i] += g[0] * grad[i];
                     });
}

template <typename T>
Var channel_standardize(Tape<T>& tape, Var input, T eps) {
  using TensorT = BasicTensor<T>;
  TensorT out = ops::channel_standardize(tape.value(input), eps);
  const Var result{static_cast<std::uint32_t>(tape.size())};
  return tape.record(std::move(out), {input}, [input, result, eps](Tape<T>& t, const TensorT& g) {
    const TensorT& x = t.value(input);
    const TensorT& xhat = t.value(result);
    TensorT& gx = t.grad_ref(input);
    const std::size_t c = x.shape()[3];
    const std::size_t n = x.size() / c;
    std::vector<T> mean(c, T{0}), var(c, T{0}), g_mean(c, T{0}), gx_mean(c, T{0});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        mean[j] += x[i * c + j];
        g_mean[j] += g[i * c + j];
        gx_mean[j] += g[i * c + j] * xhat[i * c + j];
      }
    }
    const T inv_n = T{1} / static_cast<T>(n);
    for (std::size_t j = 0; j < c; ++j) {
      mean[j] *= inv_n;
      g_mean[j] *= inv_n;
      gx_mean[j] *= inv_n;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const T d = x[i * c + j] - mean[j];
        var[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < c; ++j) var[j] = T{1} / std::sqrt(var[j] * inv_n + eps);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t k = i * c + j;
        gx[k] += var[j] * (g[k] - g_mean[j] - xhat[k] * gx_mean[j]);
      }
    }
  });
}

}  // namespace rcnet::ag

namespace rcnet {

#define RCNET_INSTANTIATE(T)                                                              \
  template BasicTensor<T> ops::global_avg_pool<T>(const BasicTensor<T>&);                 \
  template T ops::softmax_cross_entropy<T>(const BasicTensor<T>&, std::span<const int>);  \
  template BasicTensor<T> ops::softmax_cross_entropy_grad<T>(const BasicTensor<T>&,       \
                                                             std::span<const int>);       \
  template BasicTensor<T> ops::channel_standardize<T>(const BasicTensor<T>&, T);          \
  template Var ag::global_avg_pool<T>(Tape<T>&, Var);                                     \
  template Var ag::softmax_cross_entropy<T>(Tape<T>&, Var, std::vector<int>);             \
  template Var ag::channel_standardize<T>(Tape<T>&, Var, T);

RCNET_INSTANTIATE(float)
RCNET_INSTANTIATE(double)
#undef RCNET_INSTANTIATE

}  // namespace rcnet
