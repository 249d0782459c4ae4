#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "rcnet/tensor.hpp"

namespace rcnet {

/// Handle to a value recorded on a Tape.
struct Var {
  std::uint32_t id = 0;
};

/// Reverse-mode differentiation tape. Values are appended in forward order;
/// backward() replays the recorded rules in reverse, each exactly once.
/// Single-threaded by contract.
template <typename T>
class Tape {
 public:
  using TensorT = BasicTensor<T>;
  /// Receives the gradient of the node's output and accumulates into the
  /// gradients of its inputs via Tape::grad_ref.
  using BackwardFn = std::function<void(Tape&, const TensorT&)>;

  /// A value that never receives a gradient.
  Var constant(TensorT value) { return push(std::move(value), false, {}); }

  /// A leaf whose gradient is populated by backward().
  Var variable(TensorT value) { return push(std::move(value), true, {}); }

  /// Leaves that alias an external tensor instead of copying it. The tensor
  /// must outlive the tape and stay unmodified while it is in use.
  Var constant_ref(const TensorT& value) { return push_ref(value, false); }
  Var variable_ref(const TensorT& value) { return push_ref(value, true); }

  /// Records an op output. The backward rule is kept only when at least one
  /// input requires a gradient.
  Var record(TensorT value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(fn));
  }

  Var record(TensorT value, std::span<const Var> inputs, BackwardFn fn) {
    bool needs = false;
    for (Var v : inputs) needs = needs || nodes_[v.id].requires_grad;
    return push(std::move(value), needs, needs ? std::move(fn) : BackwardFn{});
  }

  const TensorT& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external != nullptr ? *n.external : n.value;
  }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  bool has_grad(Var v) const { return !nodes_[v.id].grad.empty(); }

  /// Gradient of v; zeros when nothing has flowed into it.
  TensorT grad(Var v) const {
    const Node& n = nodes_[v.id];
    return n.grad.empty() ? TensorT(value(v).shape()) : n.grad;
  }

  /// Mutable gradient buffer, allocated on first use.
  TensorT& grad_ref(Var v) {
    Node& n = nodes_[v.id];
    if (n.grad.empty()) n.grad = TensorT(value(v).shape());
    return n.grad;
  }

  /// Seeds d(root)/d(root) with `seed` in every element and replays the tape.
  void backward(Var root, T seed = T{1}) {
    grad_ref(root).fill(seed);
    backward_visits_ = 0;
    for (std::size_t i = root.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.backward || n.grad.empty()) continue;
      ++backward_visits_;
      n.backward(*this, n.grad);
    }
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t recorded_ops() const noexcept { return recorded_ops_; }
  std::size_t backward_visits() const noexcept { return backward_visits_; }

 private:
  struct Node {
    TensorT value;
    TensorT grad;
    BackwardFn backward;
    bool requires_grad = false;
    const TensorT* external = nullptr;
  };

  Var push_ref(const TensorT& value, bool requires_grad) {
    nodes_.push_back(Node{{}, {}, {}, requires_grad, &value});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  Var push(TensorT value, bool requires_grad, BackwardFn fn) {
    if (fn) ++recorded_ops_;
    nodes_.push_back(Node{std::move(value), {}, std::move(fn), requires_grad});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  std::vector<Node> nodes_;
  std::size_t recorded_ops_ = 0;
  std::size_t backward_visits_ = 0;
};

}  // namespace rcnet
