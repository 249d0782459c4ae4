#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace rcnet::ops {

using Dims3 = std::array<std::size_t, 3>;

enum class Padding { kSame, kValid };

/// Reflects `index` into [0, extent) without repeating the edge sample
/// (-1 -> 1, extent -> extent - 2). An extent of one maps everything to 0.
std::size_t reflect_index(long index, std::size_t extent);

/// Geometry of a sliding 3D window over an [H, W, S] grid. 'same' gives
/// ceil(extent / stride) outputs with mirror padding; 'valid' gives
/// floor((extent - window) / stride) + 1 with no padding.
class WindowPlan {
 public:
  WindowPlan() = default;
  WindowPlan(Dims3 input, Dims3 window, Dims3 stride, Padding padding);

  const Dims3& input() const noexcept { return input_; }
  const Dims3& output() const noexcept { return output_; }
  const Dims3& window() const noexcept { return window_; }
  const Dims3& stride() const noexcept { return stride_; }
  Padding padding() const noexcept { return padding_; }

  std::size_t output_positions() const noexcept {
    return output_[0] * output_[1] * output_[2];
  }
  std::size_t window_size() const noexcept { return window_[0] * window_[1] * window_[2]; }

  /// Input index on `axis` read by output `out` at window offset `offset`.
  std::size_t source(std::size_t axis, std::size_t out, std::size_t offset) const {
    return sources_[axis][out * window_[axis] + offset];
  }

  /// Input index of the window centre for output `out` on `axis`.
  std::size_t center(std::size_t axis, std::size_t out) const {
    return source(axis, out, window_[axis] / 2);
  }

  /// Flat input position (h, w, s) for output position `o` and window slot `w`,
  /// both flattened row-major.
  std::size_t source_position(std::size_t o, std::size_t w) const;
  std::size_t center_position(std::size_t o) const;

  /// source_position for every (o, w), laid out as [output_positions, window_size].
  std::vector<std::size_t> gather_table() const;
  std::vector<std::size_t> center_table() const;

 private:
  Dims3 input_{}, output_{}, window_{}, stride_{};
  Padding padding_ = Padding::kSame;
  std::array<std::vector<std::size_t>, 3> sources_;
};

}  // namespace rcnet::ops
