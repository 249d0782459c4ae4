#pragma once

// Literal nested-loop reference implementations. Deliberately naive and
// independent of the library's window tables and matmul helpers.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rcnet/tensor.hpp"

namespace oracle {

using rcnet::BasicTensor;
using rcnet::Shape;
using LD = long double;

inline std::size_t mirror(long i, std::size_t n) {
  if (n == 1) return 0;
  const long last = static_cast<long>(n) - 1;
  while (i < 0 || i > last) {
    if (i < 0) i = -i;
    if (i > last) i = 2 * last - i;
  }
  return static_cast<std::size_t>(i);
}

inline std::size_t out_extent(std::size_t n, std::size_t k, std::size_t s, bool same) {
  return same ? (n + s - 1) / s : (n - k) / s + 1;
}

/// Input index read at output o, window offset m.
inline std::size_t src(std::size_t n, std::size_t k, std::size_t s, bool same, std::size_t o,
                       std::size_t m) {
  if (!same) return o * s + m;
  const std::size_t out = out_extent(n, k, s, true);
  const long need = static_cast<long>((out - 1) * s + k) - static_cast<long>(n);
  const long before = (need > 0 ? need : 0) / 2;
  return mirror(static_cast<long>(o * s + m) - before, n);
}

template <typename T>
LD at4(const BasicTensor<T>& t, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  const Shape& s = t.shape();
  return static_cast<LD>(t[((a * s[1] + b) * s[2] + c) * s[3] + d]);
}

struct Geometry {
  std::size_t kh, kw, ks, sh, sw, ss;
  bool same;
};

template <typename T>
BasicTensor<T> conv_depthwise(const BasicTensor<T>& x, const BasicTensor<T>& kernel,
                              Geometry g) {
  const Shape& xs = x.shape();
  const std::size_t H = xs[0], W = xs[1], S = xs[2], C = xs[3];
  const std::size_t oh = out_extent(H, g.kh, g.sh, g.same), ow = out_extent(W, g.kw, g.sw, g.same),
                    os = out_extent(S, g.ks, g.ss, g.same);
  BasicTensor<T> out({oh, ow, os, C});
  for (std::size_t i = 0; i < oh; ++i)
    for (std::size_t j = 0; j < ow; ++j)
      for (std::size_t l = 0; l < os; ++l)
        for (std::size_t c = 0; c < C; ++c) {
          LD acc = 0;
          for (std::size_t m = 0; m < g.kh; ++m)
            for (std::size_t n = 0; n < g.kw; ++n)
              for (std::size_t z = 0; z < g.ks; ++z) {
                acc += at4(x, src(H, g.kh, g.sh, g.same, i, m), src(W, g.kw, g.sw, g.same, j, n),
                           src(S, g.ks, g.ss, g.same, l, z), c) *
                       at4(kernel, m, n, z, c);
              }
          out[((i * ow + j) * os + l) * C + c] = static_cast<T>(acc);
        }
  return out;
}

/// y[c'] = sum_c x[c] W[c][c'] (+ b[c']) at one location, in long double.
template <typename T>
std::vector<LD> project(const BasicTensor<T>& x, std::size_t h, std::size_t w, std::size_t s,
                        const BasicTensor<T>* weights, const BasicTensor<T>* bias = nullptr) {
  const std::size_t C = x.shape()[3];
  if (weights == nullptr) {
    std::vector<LD> v(C);
    for (std::size_t c = 0; c < C; ++c) v[c] = at4(x, h, w, s, c);
    return v;
  }
  const std::size_t Co = weights->shape()[1];
  std::vector<LD> y(Co, 0);
  for (std::size_t o = 0; o < Co; ++o) {
    for (std::size_t c = 0; c < C; ++c) {
      y[o] += at4(x, h, w, s, c) * static_cast<LD>((*weights)[c * Co + o]);
    }
    if (bias != nullptr) y[o] += static_cast<LD>((*bias)[o]);
  }
  return y;
}

template <typename T>
BasicTensor<T> pointwise(const BasicTensor<T>& x, const BasicTensor<T>& weights,
                         const BasicTensor<T>* bias = nullptr) {
  const Shape& xs = x.shape();
  const std::size_t Co = weights.shape()[1];
  BasicTensor<T> out({xs[0], xs[1], xs[2], Co});
  for (std::size_t h = 0; h < xs[0]; ++h)
    for (std::size_t w = 0; w < xs[1]; ++w)
      for (std::size_t s = 0; s < xs[2]; ++s) {
        const auto y = project(x, h, w, s, &weights, bias);
        for (std::size_t o = 0; o < Co; ++o) out[((h * xs[1] + w) * xs[2] + s) * Co + o] = static_cast<T>(y[o]);
      }
  return out;
}

/// Relational convolution: weight(w,c) = exp(-(q_c + k_wc)) / sum_w exp(-(q_c + k_wc)),
/// out = sum_w weight * v_wc. With heads > 0 the exponent is summed over each
/// head's channels and shared. No max shift.
template <typename T>
struct RelResult {
  BasicTensor<T> output;
  /// [oh*ow*os, window, C] weights as applied to each channel.
  std::vector<LD> weights;
};

template <typename T>
RelResult<T> relconv(const BasicTensor<T>& x, Geometry g, const BasicTensor<T>* wq,
                     const BasicTensor<T>* wk, const BasicTensor<T>* wv,
                     std::size_t heads = 0) {
  const Shape& xs = x.shape();
  const std::size_t H = xs[0], W = xs[1], S = xs[2], C = xs[3];
  const std::size_t oh = out_extent(H, g.kh, g.sh, g.same), ow = out_extent(W, g.kw, g.sw, g.same),
                    os = out_extent(S, g.ks, g.ss, g.same);
  const std::size_t nw = g.kh * g.kw * g.ks;
  RelResult<T> r{BasicTensor<T>({oh, ow, os, C}), std::vector<LD>(oh * ow * os * nw * C)};
  std::size_t o = 0;
  for (std::size_t i = 0; i < oh; ++i)
    for (std::size_t j = 0; j < ow; ++j)
      for (std::size_t l = 0; l < os; ++l, ++o) {
        const auto q = project(x, src(H, g.kh, g.sh, g.same, i, g.kh / 2),
                               src(W, g.kw, g.sw, g.same, j, g.kw / 2),
                               src(S, g.ks, g.ss, g.same, l, g.ks / 2), wq);
        std::vector<std::vector<LD>> keys, values;
        for (std::size_t m = 0; m < g.kh; ++m)
          for (std::size_t n = 0; n < g.kw; ++n)
            for (std::size_t z = 0; z < g.ks; ++z) {
              const std::size_t a = src(H, g.kh, g.sh, g.same, i, m);
              const std::size_t b = src(W, g.kw, g.sw, g.same, j, n);
              const std::size_t d = src(S, g.ks, g.ss, g.same, l, z);
              keys.push_back(project(x, a, b, d, wk));
              values.push_back(project(x, a, b, d, wv));
            }
        for (std::size_t c = 0; c < C; ++c) {
          std::vector<LD> e(nw);
          LD norm = 0;
          for (std::size_t w = 0; w < nw; ++w) {
            LD expo = 0;
            if (heads == 0) {
              expo = q[c] + keys[w][c];
            } else {
              const std::size_t size = C / heads, h0 = (c / size) * size;
              for (std::size_t cc = h0; cc < h0 + size; ++cc) expo += q[cc] + keys[w][cc];
            }
            e[w] = std::exp(-expo);
            norm += e[w];
          }
          LD acc = 0;
          for (std::size_t w = 0; w < nw; ++w) {
            const LD weight = e[w] / norm;
            r.weights[(o * nw + w) * C + c] = weight;
            acc += weight * values[w][c];
          }
          r.output[o * C + c] = static_cast<T>(acc);
        }
      }
  return r;
}

/// softmax(Q K^T / sqrt(C)) V over all H*W*S tokens.
template <typename T>
BasicTensor<T> attention(const BasicTensor<T>& x, const BasicTensor<T>& wq,
                         const BasicTensor<T>& wk, const BasicTensor<T>& wv) {
  const Shape& xs = x.shape();
  const std::size_t N = xs[0] * xs[1] * xs[2], C = xs[3];
  const BasicTensor<T> tokens = x.reshaped({N, 1, 1, C});
  std::vector<std::vector<LD>> Q, K, V;
  for (std::size_t t = 0; t < N; ++t) {
    Q.push_back(project(tokens, t, 0, 0, &wq));
    K.push_back(project(tokens, t, 0, 0, &wk));
    V.push_back(project(tokens, t, 0, 0, &wv));
  }
  BasicTensor<T> out(xs);
  const LD scale = 1.0L / std::sqrt(static_cast<LD>(C));
  for (std::size_t a = 0; a < N; ++a) {
    std::vector<LD> score(N);
    LD norm = 0;
    for (std::size_t b = 0; b < N; ++b) {
      LD dot = 0;
      for (std::size_t c = 0; c < C; ++c) dot += Q[a][c] * K[b][c];
      score[b] = std::exp(dot * scale);
      norm += score[b];
    }
    for (std::size_t c = 0; c < C; ++c) {
      LD acc = 0;
      for (std::size_t b = 0; b < N; ++b) acc += score[b] / norm * V[b][c];
      out[a * C + c] = static_cast<T>(acc);
    }
  }
  return out;
}

template <typename T>
double max_abs_diff(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.shape() != b.shape()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::fmax(m, std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  }
  return m;
}

}  // namespace oracle
