#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rcnet/tape.hpp"

namespace rcnet {

/// Scalar-valued function of one or more leaves; must return a [1]-shaped value.
using ScalarFnMulti = std::function<Var(Tape<double>&, std::span<const Var>)>;
using ScalarFn = std::function<Var(Tape<double>&, Var)>;

/// Compares reverse-mode gradients against central differences in double
/// precision. Returns max over all coordinates of
/// |analytic - numeric| / max(1, |numeric|). Throws kNumeric on any
/// non-finite evaluation.
double grad_check(const ScalarFnMulti& f, std::span<const TensorD> inputs,
                  double eps = 1e-6);

double grad_check(const ScalarFn& f, const TensorD& x, double eps = 1e-6);

/// Analytic gradients of f at `inputs`, one per input.
std::vector<TensorD> analytic_gradients(const ScalarFnMulti& f,
                                        std::span<const TensorD> inputs);

}  // namespace rcnet
