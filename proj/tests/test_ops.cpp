#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rcnet/autograd.hpp"
#include "rcnet/grad_check.hpp"
#include "rcnet/ops/attention.hpp"
#include "rcnet/ops/conv3d.hpp"
#include "rcnet/ops/nn.hpp"
#include "rcnet/ops/relconv3d.hpp"
#include "support/oracles.hpp"

using namespace rcnet;
using ops::Dims3;
using ops::Padding;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an rcnet::Error");
  return ErrorCode::kIo;
}

Var weighted_sum(Tape<double>& t, Var out, std::uint64_t seed) {
  const Var r = t.constant(TensorD::random_uniform(t.value(out).shape(), seed));
  return ag::sum_all(t, ag::mul(t, out, r));
}

oracle::Geometry geom(Dims3 k, Dims3 s, Padding p) {
  return {k[0], k[1], k[2], s[0], s[1], s[2], p == Padding::kSame};
}

// x shifted by +1 along `axis`; the vacated slice is filled with noise.
TensorD shift_one(const TensorD& x, std::size_t axis, std::uint64_t seed) {
  TensorD out = TensorD::random_uniform(x.shape(), seed);
  const Shape& s = x.shape();
  for (std::size_t h = 0; h < s[0]; ++h)
    for (std::size_t w = 0; w < s[1]; ++w)
      for (std::size_t l = 0; l < s[2]; ++l) {
        std::size_t d[3] = {h, w, l};
        if (d[axis] + 1 >= s[axis]) continue;
        std::size_t e[3] = {h, w, l};
        ++e[axis];
        for (std::size_t c = 0; c < s[3]; ++c) {
          out[((e[0] * s[1] + e[1]) * s[2] + e[2]) * s[3] + c] =
              x[((d[0] * s[1] + d[1]) * s[2] + d[2]) * s[3] + c];
        }
      }
  return out;
}

// max |a(p + e_axis) - b(p)| over interior positions p with margin `m` on every axis.
double shifted_interior_diff(const TensorD& shifted_out, const TensorD& out, std::size_t axis,
                             std::size_t m) {
  const Shape& s = out.shape();
  double worst = 0;
  for (std::size_t h = m; h + m < s[0]; ++h)
    for (std::size_t w = m; w + m < s[1]; ++w)
      for (std::size_t l = m; l + m < s[2]; ++l) {
        std::size_t e[3] = {h, w, l};
        ++e[axis];
        if (e[axis] + m >= s[axis]) continue;
        for (std::size_t c = 0; c < s[3]; ++c) {
          const double a = shifted_out[((e[0] * s[1] + e[1]) * s[2] + e[2]) * s[3] + c];
          const double b = out[((h * s[1] + w) * s[2] + l) * s[3] + c];
          worst = std::fmax(worst, std::fabs(a - b));
        }
      }
  return worst;
}

ops::RelConvProjections<double> random_projections(std::size_t c, std::uint64_t seed) {
  return {TensorD::random_uniform({c, c}, seed), TensorD::random_uniform({c, c}, seed + 1),
          TensorD::random_uniform({c, c}, seed + 2)};
}

}  // namespace

TEST_CASE("reflect_index mirrors without repeating the edge") {
  CHECK(ops::reflect_index(-1, 4) == 1);
  CHECK(ops::reflect_index(-2, 4) == 2);
  CHECK(ops::reflect_index(4, 4) == 2);
  CHECK(ops::reflect_index(5, 4) == 1);
  CHECK(ops::reflect_index(0, 1) == 0);
  CHECK(ops::reflect_index(-3, 1) == 0);
  for (long i = -20; i < 20; ++i) {
    for (std::size_t n : {1u, 2u, 3u, 5u}) CHECK(ops::reflect_index(i, n) == oracle::mirror(i, n));
  }
}

TEST_CASE("window plan extents") {
  const ops::WindowPlan same({27, 27, 100}, {3, 3, 3}, {2, 2, 2}, Padding::kSame);
  CHECK(same.output() == Dims3{14, 14, 50});
  const ops::WindowPlan valid({7, 5, 3}, {3, 3, 3}, {2, 1, 1}, Padding::kValid);
  CHECK(valid.output() == Dims3{3, 3, 1});
  CHECK(code_of([] { ops::WindowPlan({2, 5, 5}, {3, 3, 3}, {1, 1, 1}, Padding::kValid); }) ==
        ErrorCode::kInvalidShape);
}

TEST_CASE("conv3d_depthwise examples") {
  const TensorD x = TensorD::random_uniform({4, 5, 3, 2}, 3);
  TensorD delta({3, 3, 3, 2});
  delta.at({1, 1, 1, 0}) = 1;
  delta.at({1, 1, 1, 1}) = 1;
  CHECK(ops::conv3d_depthwise(x, {delta, {1, 1, 1}, Padding::kSame}).storage() == x.storage());

  const TensorD ones({4, 4, 4, 1}, 1.0);
  const TensorD k1({3, 3, 3, 1}, 1.0);
  const TensorD o = ops::conv3d_depthwise(ones, {k1, {1, 1, 1}, Padding::kValid});
  CHECK(o.shape() == Shape{2, 2, 2, 1});
  for (double v : o.data()) CHECK(v == 27.0);

  CHECK(code_of([&] {
          ops::conv3d_depthwise(x, {TensorD({3, 3, 3, 3}), {1, 1, 1}, Padding::kSame});
        }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] {
          ops::conv3d_depthwise(x, {TensorD({5, 3, 3, 2}), {1, 1, 1}, Padding::kValid});
        }) == ErrorCode::kInvalidShape);
}

TEST_CASE("conv3d_depthwise matches nested-loop oracle") {
  struct Case {
    Shape in;
    Dims3 k, s;
    Padding p;
  };
  const std::vector<Case> cases{{{5, 5, 5, 2}, {3, 3, 3}, {1, 1, 1}, Padding::kSame},
                                {{5, 4, 6, 3}, {3, 1, 5}, {2, 1, 2}, Padding::kSame},
                                {{5, 5, 5, 1}, {3, 3, 3}, {2, 2, 1}, Padding::kValid},
                                {{2, 3, 4, 2}, {3, 3, 3}, {1, 1, 1}, Padding::kSame}};
  std::uint64_t seed = 0;
  for (const Case& c : cases) {
    for (int rep = 0; rep < 5; ++rep, ++seed) {
      const TensorD x = TensorD::random_uniform(c.in, seed);
      const TensorD k = TensorD::random_uniform({c.k[0], c.k[1], c.k[2], c.in[3]}, seed + 50);
      const TensorD got = ops::conv3d_depthwise(x, {k, c.s, c.p});
      CHECK(oracle::max_abs_diff(got, oracle::conv_depthwise(x, k, geom(c.k, c.s, c.p))) < 1e-12);
      const Tensor gotf = ops::conv3d_depthwise(x.cast<float>(), {k.cast<float>(), c.s, c.p});
      CHECK(oracle::max_abs_diff(gotf, oracle::conv_depthwise(x, k, geom(c.k, c.s, c.p)).cast<float>()) < 1e-5);
    }
  }
}

TEST_CASE("conv3d_pointwise") {
  const TensorD x = TensorD::random_uniform({2, 3, 2, 3}, 1);
  TensorD eye({3, 3});
  for (std::size_t i = 0; i < 3; ++i) eye.at({i, i}) = 1;
  const TensorD zero_bias({3});
  CHECK(ops::conv3d_pointwise(x, eye, &zero_bias).storage() == x.storage());

  const TensorD two = TensorD::random_uniform({2, 2, 1, 2}, 2);
  const TensorD sum = ops::conv3d_pointwise(two, TensorD({2, 1}, 1.0));
  for (std::size_t i = 0; i < 4; ++i) CHECK(sum[i] == doctest::Approx(two[2 * i] + two[2 * i + 1]));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TensorD w = TensorD::random_uniform({3, 4}, seed);
    const TensorD b = TensorD::random_uniform({4}, seed + 7);
    CHECK(oracle::max_abs_diff(ops::conv3d_pointwise(x, w, &b), oracle::pointwise(x, w, &b)) < 1e-12);
  }
  CHECK(code_of([&] { ops::conv3d_pointwise(x, TensorD({2, 4})); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("self_attention_global") {
  const TensorD one = TensorD::random_uniform({1, 1, 1, 3}, 4);
  const ops::AttnParams<double> p{TensorD::random_uniform({3, 3}, 5),
                                  TensorD::random_uniform({3, 3}, 6),
                                  TensorD::random_uniform({3, 3}, 7)};
  const TensorD out1 = ops::self_attention_global(one, p);
  CHECK(oracle::max_abs_diff(out1, oracle::pointwise(one, p.value)) < 1e-12);

  TensorD same({2, 2, 2, 3});
  for (std::size_t i = 0; i < same.size(); ++i) same[i] = one[i % 3];
  const TensorD outs = ops::self_attention_global(same, p);
  for (std::size_t i = 0; i < outs.size(); ++i) CHECK(outs[i] == doctest::Approx(out1[i % 3]));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TensorD x = TensorD::random_uniform({2, 2, 2, 3}, seed);
    const ops::AttnParams<double> q{TensorD::random_uniform({3, 3}, seed + 1),
                                    TensorD::random_uniform({3, 3}, seed + 2),
                                    TensorD::random_uniform({3, 3}, seed + 3)};
    CHECK(oracle::max_abs_diff(ops::self_attention_global(x, q),
                               oracle::attention(x, q.query, q.key, q.value)) < 1e-12);
  }

  const TensorD huge({2, 1, 1, 3}, 1e200);
  CHECK(code_of([&] { ops::self_attention_global(huge, p); }) == ErrorCode::kNumeric);
}

TEST_CASE("relconv3d examples") {
  // Constant input: every key is equal, so weights are uniform.
  const TensorD flat({4, 4, 4, 2}, 0.5);
  const auto proj = random_projections(2, 11);
  const auto r = ops::relconv3d_forward(flat, {{}, proj});
  for (double w : r.context.weights.data()) CHECK(w == doctest::Approx(1.0 / 27));

  // Uniform keys with varying values: output is the window mean of V.
  const TensorD x = TensorD::random_uniform({4, 4, 4, 2}, 12);
  ops::RelConvProjections<double> zero_key = proj;
  zero_key.key.fill(0);
  const TensorD mean_v = ops::relconv3d(x, {{}, zero_key});
  const TensorD v = ops::conv3d_pointwise(x, proj.value);
  const TensorD box = ops::conv3d_depthwise(v, {TensorD({3, 3, 3, 2}, 1.0 / 27), {1, 1, 1}, Padding::kSame});
  CHECK(oracle::max_abs_diff(mean_v, box) < 1e-12);

  // Single-slot window: output is the centre's value projection.
  const TensorD single = ops::relconv3d(x, {{{1, 1, 1}}, proj});
  CHECK(oracle::max_abs_diff(single, v) < 1e-12);

  CHECK(code_of([&] { ops::relconv3d(x, {{{3, 2, 3}}, std::nullopt}); }) ==
        ErrorCode::kInvalidArgument);
  ops::RelConvProjections<double> bad = proj;
  bad.key = TensorD({2, 3});
  CHECK(code_of([&] { ops::relconv3d(x, {{}, bad}); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] {
          ops::relconv3d(x, {{{3, 3, 3}, {1, 1, 1}, Padding::kSame, ops::RelWeighting::kPerHead, 3},
                             std::nullopt});
        }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { ops::relconv3d_backward(ops::RelConvContext<double>{}, TensorD({1})); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("relconv3d matches nested-loop oracle") {
  struct Case {
    Shape in;
    ops::RelConvOptions opt;
    bool proj;
  };
  using ops::RelWeighting;
  const std::vector<Case> cases{
      {{5, 5, 5, 2}, {}, false},
      {{5, 5, 5, 3}, {}, true},
      {{4, 5, 3, 2}, {{3, 3, 3}, {2, 2, 2}, Padding::kSame}, true},
      {{5, 5, 5, 2}, {{3, 1, 5}, {1, 2, 1}, Padding::kValid}, true},
      {{3, 4, 5, 4}, {{3, 3, 3}, {1, 1, 1}, Padding::kSame, RelWeighting::kPerHead, 2}, true},
      {{3, 3, 3, 3}, {{3, 3, 3}, {1, 1, 1}, Padding::kSame, RelWeighting::kPerHead, 1}, true}};
  std::uint64_t seed = 100;
  for (const Case& c : cases) {
    for (int rep = 0; rep < 4; ++rep, ++seed) {
      const TensorD x = TensorD::random_uniform(c.in, seed);
      std::optional<ops::RelConvProjections<double>> p;
      if (c.proj) p = random_projections(c.in[3], seed + 1000);
      const auto got = ops::relconv3d_forward(x, {c.opt, p});
      const std::size_t heads = c.opt.weighting == RelWeighting::kPerHead ? c.opt.heads : 0;
      const auto want = oracle::relconv(x, geom(c.opt.window, c.opt.stride, c.opt.padding),
                                        p ? &p->query : nullptr, p ? &p->key : nullptr,
                                        p ? &p->value : nullptr, heads);
      CHECK(oracle::max_abs_diff(got.output, want.output) < 1e-12);

      // Weights: [positions, window, groups] versus per-channel oracle weights.
      const std::size_t C = c.in[3];
      const std::size_t groups = got.context.groups;
      double worst = 0;
      for (std::size_t i = 0; i < want.weights.size(); ++i) {
        const std::size_t ch = i % C;
        const std::size_t ow = i / C;
        const double w = got.context.weights[ow * groups + ch / (C / groups)];
        worst = std::fmax(worst, std::fabs(w - static_cast<double>(want.weights[i])));
      }
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("relconv3d weights are positive and normalized") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Tensor x = Tensor::random_uniform({5, 4, 6, 3}, seed, -3.0f, 3.0f);
    ops::RelConvProjections<float> p{Tensor::random_uniform({3, 3}, seed, -2, 2),
                                     Tensor::random_uniform({3, 3}, seed + 1, -2, 2),
                                     Tensor::random_uniform({3, 3}, seed + 2, -2, 2)};
    const auto r = ops::relconv3d_forward(x, {{}, p});
    const Tensor& w = r.context.weights;
    const std::size_t nw = 27, g = r.context.groups;
    for (std::size_t o = 0; o < w.size() / (nw * g); ++o) {
      for (std::size_t c = 0; c < g; ++c) {
        double sum = 0;
        for (std::size_t k = 0; k < nw; ++k) {
          const float v = w[(o * nw + k) * g + c];
          CHECK(v > 0.0f);
          sum += v;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-6);
      }
    }
  }
}

TEST_CASE("relational weights: monotone in key, invariant to exponent shift") {
  const std::size_t C = 3, nw = 5;
  const TensorD q = TensorD::random_uniform({C}, 1);
  TensorD keys = TensorD::random_uniform({nw, C}, 2);
  const auto base = ops::relational_weights<double>(q.data(), keys.data(), nw, C, C);
  for (std::size_t w = 0; w < nw; ++w) {
    for (std::size_t c = 0; c < C; ++c) {
      TensorD bumped = keys;
      bumped[w * C + c] += 0.25;
      const auto after = ops::relational_weights<double>(q.data(), bumped.data(), nw, C, C);
      CHECK(after[w * C + c] < base[w * C + c]);
    }
  }
  // Shifting every exponent of a channel by the same amount cancels.
  TensorD shifted = keys;
  for (std::size_t w = 0; w < nw; ++w) shifted[w * C + 1] += 700.0;
  const auto same = ops::relational_weights<double>(q.data(), shifted.data(), nw, C, C);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::fabs(same[i] - base[i]) < 1e-6);
  for (double v : same) CHECK(std::isfinite(v));
}

TEST_CASE("shift equivariance of stride-1 aggregation") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TensorD x = TensorD::random_uniform({7, 6, 7, 2}, seed);
    const TensorD k = TensorD::random_uniform({3, 3, 3, 2}, seed + 10);
    const auto p = random_projections(2, seed + 20);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const TensorD xs = shift_one(x, axis, seed + 30);
      const ops::Conv3dParams<double> cp{k, {1, 1, 1}, Padding::kSame};
      CHECK(shifted_interior_diff(ops::conv3d_depthwise(xs, cp), ops::conv3d_depthwise(x, cp), axis, 1) < 1e-6);
      const ops::RelConvParams<double> rp{{}, p};
      CHECK(shifted_interior_diff(ops::relconv3d(xs, rp), ops::relconv3d(x, rp), axis, 1) < 1e-6);
    }
  }
}

TEST_CASE("relconv3d backward special cases") {
  const TensorD x = TensorD::random_uniform({3, 3, 3, 2}, 5);
  const auto p = random_projections(2, 6);
  const auto fwd = ops::relconv3d_forward(x, {{}, p});
  const auto zero = ops::relconv3d_backward(fwd.context, TensorD(fwd.output.shape()));
  for (const TensorD* g : {&zero.input, &zero.query_weights, &zero.key_weights, &zero.value_weights}) {
    for (double v : g->data()) CHECK(v == 0.0);
  }

  // One valid window over a constant map: weights are 1/27 and the only input
  // gradient is upstream / 27 routed back through W_V.
  const TensorD flat({3, 3, 3, 2}, 0.3);
  const auto one = ops::relconv3d_forward(flat, {{{3, 3, 3}, {1, 1, 1}, Padding::kValid}, p});
  REQUIRE(one.output.shape() == Shape{1, 1, 1, 2});
  const TensorD g({1, 1, 1, 2}, {0.7, -1.3});
  const auto grads = ops::relconv3d_backward(one.context, g);
  for (std::size_t loc = 0; loc < 27; ++loc) {
    for (std::size_t c = 0; c < 2; ++c) {
      const double want = (g[0] * p.value.at({c, 0}) + g[1] * p.value.at({c, 1})) / 27.0;
      CHECK(grads.input[loc * 2 + c] == doctest::Approx(want).epsilon(1e-12));
    }
  }
  // The centre query cancels in the window softmax.
  for (double v : grads.query_weights.data()) CHECK(std::fabs(v) < 1e-15);
}

TEST_CASE("op gradients pass grad_check") {
  using ops::RelWeighting;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    const TensorD x = TensorD::random_uniform({4, 3, 4, 2}, seed);

    for (const auto& [stride, pad] : {std::pair{Dims3{1, 1, 1}, Padding::kSame},
                                      std::pair{Dims3{2, 1, 2}, Padding::kSame},
                                      std::pair{Dims3{1, 2, 1}, Padding::kValid}}) {
      const std::vector<TensorD> in{x, TensorD::random_uniform({3, 3, 3, 2}, seed + 1)};
      CHECK(grad_check(
                [&](Tape<double>& t, std::span<const Var> v) {
                  return weighted_sum(t, ag::conv3d_depthwise(t, v[0], v[1], stride, pad), seed);
                },
                in) < 1e-5);
    }

    const std::vector<TensorD> pw{x, TensorD::random_uniform({2, 3}, seed + 2),
                                  TensorD::random_uniform({3}, seed + 3)};
    CHECK(grad_check(
              [&](Tape<double>& t, std::span<const Var> v) {
                return weighted_sum(t, ag::conv3d_pointwise(t, v[0], v[1], v[2]), seed);
              },
              pw) < 1e-5);

    const std::vector<ops::RelConvOptions> rel_opts{
        {},
        {{3, 3, 3}, {2, 2, 2}, Padding::kSame},
        {{3, 1, 3}, {1, 1, 1}, Padding::kValid},
        {{3, 3, 3}, {1, 1, 1}, Padding::kSame, RelWeighting::kPerHead, 1}};
    for (const auto& opt : rel_opts) {
      const auto p = random_projections(2, seed + 4);
      const std::vector<TensorD> in{x, p.query, p.key, p.value};
      CHECK(grad_check(
                [&](Tape<double>& t, std::span<const Var> v) {
                  return weighted_sum(
                      t, ag::relconv3d(t, v[0], opt, std::array<Var, 3>{v[1], v[2], v[3]}), seed);
                },
                in) < 1e-5);
    }
    CHECK(grad_check(
              [&](Tape<double>& t, Var v) {
                return weighted_sum(t, ag::relconv3d(t, v, {}, std::nullopt), seed);
              },
              x) < 1e-5);
    const TensorD x4 = TensorD::random_uniform({3, 2, 3, 4}, seed + 5);
    const auto p4 = random_projections(4, seed + 6);
    const std::vector<TensorD> in4{x4, p4.query, p4.key, p4.value};
    CHECK(grad_check(
              [&](Tape<double>& t, std::span<const Var> v) {
                const ops::RelConvOptions opt{{3, 3, 3}, {1, 1, 1}, Padding::kSame,
                                              RelWeighting::kPerHead, 2};
                return weighted_sum(t, ag::relconv3d(t, v[0], opt, std::array<Var, 3>{v[1], v[2], v[3]}),
                                    seed);
              },
              in4) < 1e-5);

    const TensorD xa = TensorD::random_uniform({2, 2, 2, 3}, seed + 7);
    const auto pa = random_projections(3, seed + 8);
    const std::vector<TensorD> ina{xa, pa.query, pa.key, pa.value};
    CHECK(grad_check(
              [&](Tape<double>& t, std::span<const Var> v) {
                return weighted_sum(
                    t, ag::self_attention_global(t, v[0], std::array<Var, 3>{v[1], v[2], v[3]}), seed);
              },
              ina) < 1e-5);

    CHECK(grad_check([&](Tape<double>& t, Var v) { return weighted_sum(t, ag::global_avg_pool(t, v), seed); },
                     x) < 1e-5);
    CHECK(grad_check(
              [&](Tape<double>& t, Var v) { return weighted_sum(t, ag::channel_standardize(t, v), seed); },
              x) < 1e-5);
    const TensorD logits = TensorD::random_uniform({3, 4}, seed + 9, -3, 3);
    const std::vector<int> labels{1 + static_cast<int>(seed % 4), 2, 4};
    CHECK(grad_check([&](Tape<double>& t, Var v) { return ag::softmax_cross_entropy(t, v, labels); },
                     logits) < 1e-5);
  }
}

TEST_CASE("global_avg_pool") {
  const TensorD c({2, 3, 2, 2}, 1.5);
  CHECK(ops::global_avg_pool(c).storage() == std::vector<double>{1.5, 1.5});
  const TensorD single = TensorD::random_uniform({1, 1, 1, 4}, 3);
  CHECK(ops::global_avg_pool(single).storage() == single.storage());
  const TensorD x = TensorD::random_uniform({3, 2, 4, 3}, 4);
  const TensorD g = ops::global_avg_pool(x);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    long double sum = 0;
    for (std::size_t i = 0; i < 24; ++i) sum += x[i * 3 + ch];
    CHECK(std::fabs(g[ch] - static_cast<double>(sum / 24)) < 1e-6);
  }
}

TEST_CASE("softmax_cross_entropy") {
  const TensorD uniform({1, 4}, 0.3);
  const std::vector<int> l1{2};
  CHECK(ops::softmax_cross_entropy(uniform, std::span<const int>(l1)) == doctest::Approx(std::log(4.0)));
  const TensorD sure({1, 3}, {1000.0, 0.0, 0.0});
  const std::vector<int> first{1};
  CHECK(ops::softmax_cross_entropy(sure, std::span<const int>(first)) < 1e-12);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TensorD z = TensorD::random_uniform({3, 5}, seed, -4, 4);
    const std::vector<int> labels{1, 3, 5};
    long double want = 0;
    for (std::size_t b = 0; b < 3; ++b) {
      long double norm = 0;
      for (std::size_t k = 0; k < 5; ++k) norm += std::exp(static_cast<long double>(z[b * 5 + k]));
      want += -std::log(std::exp(static_cast<long double>(z[b * 5 + labels[b] - 1])) / norm);
    }
    CHECK(std::fabs(ops::softmax_cross_entropy(z, std::span<const int>(labels)) -
                    static_cast<double>(want / 3)) < 1e-7);
  }
  const std::vector<int> bad{6};
  CHECK(code_of([&] { ops::softmax_cross_entropy(TensorD({1, 5}), std::span<const int>(bad)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("channel_standardize") {
  const TensorD x = TensorD::random_uniform({3, 3, 2, 2}, 8, -5, 5);
  const TensorD y = ops::channel_standardize(x, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0, sq = 0;
    for (std::size_t i = 0; i < 18; ++i) mean += y[i * 2 + c];
    mean /= 18;
    for (std::size_t i = 0; i < 18; ++i) sq += (y[i * 2 + c] - mean) * (y[i * 2 + c] - mean);
    CHECK(std::fabs(mean) < 1e-12);
    CHECK(sq / 18 == doctest::Approx(1.0));
  }
}
