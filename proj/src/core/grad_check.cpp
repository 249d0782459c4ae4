#include "rcnet/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace rcnet {
namespace {

double evaluate(const ScalarFnMulti& f, std::span<const TensorD> inputs) {
  Tape<double> tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const TensorD& x : inputs) leaves.push_back(tape.constant(x));
  const TensorD& y = tape.value(f(tape, leaves));
  if (y.size() != 1) fail(ErrorCode::kShapeMismatch, "grad_check: function is not scalar");
  if (!std::isfinite(y[0])) fail(ErrorCode::kNumeric, "grad_check: non-finite value");
  return y[0];
}

}  // namespace

std::vector<TensorD> analytic_gradients(const ScalarFnMulti& f,
                                        std::span<const TensorD> inputs) {
  Tape<double> tape;
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const TensorD& x : inputs) leaves.push_back(tape.variable(x));
  const Var out = f(tape, leaves);
  if (tape.value(out).size() != 1) {
    fail(ErrorCode::kShapeMismatch, "grad_check: function is not scalar");
  }
  if (!std::isfinite(tape.value(out)[0])) {
    fail(ErrorCode::kNumeric, "grad_check: non-finite value");
  }
  tape.backward(out);
  std::vector<TensorD> grads;
  grads.reserve(leaves.size());
  for (Var v : leaves) grads.push_back(tape.grad(v));
  return grads;
}

double grad_check(const ScalarFnMulti& f, std::span<const TensorD> inputs, double eps) {
  const std::vector<TensorD> analytic = analytic_gradients(f, inputs);
  std::vector<TensorD> probe(inputs.begin(), inputs.end());
  double worst = 0.0;
  for (std::size_t t = 0; t < probe.size(); ++t) {
    for (std::size_t i = 0; i < probe[t].size(); ++i) {
      const double saved = probe[t][i];
      probe[t][i] = saved + eps;
      const double up = evaluate(f, probe);
      probe[t][i] = saved - eps;
      const double down = evaluate(f, probe);
      probe[t][i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[t][i];
      if (!std::isfinite(a)) fail(ErrorCode::kNumeric, "grad_check: non-finite gradient");
      worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(numeric)));
    }
  }
  return worst;
}

double grad_check(const ScalarFn& f, const TensorD& x, double eps) {
  const TensorD inputs[] = {x};
  return grad_check(
      [&f](Tape<double>& tape, std::span<const Var> leaves) { return f(tape, leaves[0]); },
      inputs, eps);
}

}  // namespace rcnet
