#include "rcnet/tensor.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace rcnet {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

void validate_shape(const Shape& shape) {
  if (shape.empty()) fail(ErrorCode::kInvalidShape, "shape must have rank >= 1");
  for (std::size_t e : shape) {
    if (e == 0) {
      fail(ErrorCode::kInvalidShape, "zero extent in shape " + shape_to_string(shape));
    }
  }
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (data_.size() != shape_size(shape_)) {
    fail(ErrorCode::kShapeMismatch, "data length " + std::to_string(data_.size()) +
                                        " does not match shape " +
                                        shape_to_string(shape_));
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::random_uniform(Shape shape, std::uint64_t seed, T lo,
                                              T hi) {
  BasicTensor t(std::move(shape));
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(static_cast<double>(lo),
                                              static_cast<double>(hi));
  for (T& v : t.data_) v = static_cast<T>(dist(gen));
  return t;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::random_normal(Shape shape, std::uint64_t seed,
                                             T stddev) {
  BasicTensor t(std::move(shape));
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, static_cast<double>(stddev));
  for (T& v : t.data_) v = static_cast<T>(dist(gen));
  return t;
}

template <typename T>
std::size_t BasicTensor<T>::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    fail(ErrorCode::kAxisOutOfRange, "axis " + std::to_string(axis) +
                                         " out of range for rank " +
                                         std::to_string(shape_.size()));
  }
  return shape_[axis];
}

template <typename T>
std::size_t BasicTensor<T>::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    fail(ErrorCode::kShapeMismatch, "index rank does not match tensor rank");
  }
  std::size_t off = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) {
      fail(ErrorCode::kAxisOutOfRange, "index out of bounds on axis " +
                                           std::to_string(axis));
    }
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

template <typename T>
T& BasicTensor<T>::at(std::initializer_list<std::size_t> index) {
  return data_[offset(index)];
}

template <typename T>
const T& BasicTensor<T>::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(index)];
}

template <typename T>
void BasicTensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) const {
  validate_shape(shape);
  if (shape_size(shape) != data_.size()) {
    fail(ErrorCode::kShapeMismatch, "cannot reshape " + shape_to_string(shape_) +
                                        " to " + shape_to_string(shape));
  }
  return BasicTensor(std::move(shape), data_);
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace rcnet
