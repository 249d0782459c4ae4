#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "rcnet/tape.hpp"

// Differentiable tensor primitives. No broadcasting: binary ops require
// identical shapes and shape adaptation goes through reshape/expand.
namespace rcnet::ag {

enum class Elementwise { kAdd, kSub, kMul, kExp, kNeg };

template <typename T>
Var elementwise(Tape<T>& tape, Elementwise op, Var a, std::optional<Var> b = {});

template <typename T>
Var add(Tape<T>& tape, Var a, Var b) { return elementwise(tape, Elementwise::kAdd, a, b); }
template <typename T>
Var sub(Tape<T>& tape, Var a, Var b) { return elementwise(tape, Elementwise::kSub, a, b); }
template <typename T>
Var mul(Tape<T>& tape, Var a, Var b) { return elementwise(tape, Elementwise::kMul, a, b); }
template <typename T>
Var exp(Tape<T>& tape, Var a) { return elementwise(tape, Elementwise::kExp, a); }
template <typename T>
Var neg(Tape<T>& tape, Var a) { return elementwise(tape, Elementwise::kNeg, a); }

/// Sums over `axis`. The result drops that axis; a rank-1 input reduces to [1].
template <typename T>
Var reduce_sum(Tape<T>& tape, Var a, std::size_t axis);

/// Sum of every element, shape [1].
template <typename T>
Var sum_all(Tape<T>& tape, Var a);

template <typename T>
Var reshape(Tape<T>& tape, Var a, Shape shape);

/// Tiles `a` over new leading axes: shape S becomes leading ++ S.
template <typename T>
Var expand(Tape<T>& tape, Var a, const Shape& leading);

/// Stacks equally shaped values along a new leading axis.
template <typename T>
Var stack(Tape<T>& tape, std::span<const Var> items);

/// x * sigmoid(x).
template <typename T>
Var silu(Tape<T>& tape, Var a);

}  // namespace rcnet::ag
