#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "rcnet/error.hpp"

namespace rcnet {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense row-major N-dimensional array. Feature maps use the layout
/// [H, W, S, C] with channels innermost.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  /// Constant-filled tensor. Every extent must be at least 1.
  explicit BasicTensor(Shape shape, T fill = T{0});

  BasicTensor(Shape shape, std::vector<T> data);

  /// Uniform values in [lo, hi), deterministic in (seed, shape).
  static BasicTensor random_uniform(Shape shape, std::uint64_t seed, T lo = T{-1},
                                    T hi = T{1});

  /// Standard normal values scaled by `stddev`, deterministic in (seed, shape).
  static BasicTensor random_normal(Shape shape, std::uint64_t seed, T stddev = T{1});

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  /// Bounds-checked multi-index access.
  T& at(std::initializer_list<std::size_t> index);
  const T& at(std::initializer_list<std::size_t> index) const;

  void fill(T value);

  /// Same data under a new shape of equal element count.
  BasicTensor reshaped(Shape shape) const;

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(out));
  }

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

void validate_shape(const Shape& shape);

template <typename T>
void require_same_shape(const BasicTensor<T>& a, const BasicTensor<T>& b,
                        const char* what) {
  if (a.shape() != b.shape()) {
    fail(ErrorCode::kShapeMismatch, std::string(what) + ": shape " +
                                        shape_to_string(a.shape()) + " vs " +
                                        shape_to_string(b.shape()));
  }
}

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace rcnet
