#include "rcnet/train/adamw.hpp"

#include <cmath>
#include <string>

#include "rcnet/error.hpp"

namespace rcnet::train {

void adamw_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                OptimizerState& state, double lr, double weight_decay) {
  require(params.size() == grads.size(), ErrorCode::kShapeMismatch,
          "adamw: parameter and gradient counts differ");
  require(lr > 0.0, ErrorCode::kInvalidArgument, "adamw: lr must be > 0");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], grads[i], "adamw");
    for (float g : grads[i].data()) {
      if (!std::isfinite(g)) {
        fail(ErrorCode::kNumeric, "adamw: non-finite gradient in parameter " + std::to_string(i));
      }
    }
  }
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  }
  require(state.m.size() == params.size(), ErrorCode::kShapeMismatch,
          "adamw: optimizer state does not match parameters");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const float b1 = static_cast<float>(state.beta1);
  const float b2 = static_cast<float>(state.beta2);
  const float decay = static_cast<float>(1.0 - lr * weight_decay);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    const Tensor& g = grads[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = b1 * m[k] + (1.0f - b1) * g[k];
      v[k] = b2 * v[k] + (1.0f - b2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] *= decay;
      p[k] -= static_cast<float>(lr * m_hat / (std::sqrt(v_hat) + state.eps));
    }
  }
}

}  // namespace rcnet::train
