#pragma once

#include <cstdint>
#include <vector>

#include "rcnet/tensor.hpp"

namespace rcnet::train {

struct OptimizerState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One AdamW update with bias-corrected moments and decoupled weight decay
/// (p -= lr * wd * p, applied apart from the adaptive step). Moments are
/// allocated on first use. Non-finite gradients abort before anything is
/// modified.
void adamw_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                OptimizerState& state, double lr, double weight_decay);

}  // namespace rcnet::train
