#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "rcnet/data/hypercube.hpp"

namespace rcnet::data {

struct PixelIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
  friend auto operator<=>(const PixelIndex&, const PixelIndex&) = default;
};

/// An s x s x S cube centred on a labeled pixel.
struct PatchSample {
  Tensor cube;
  int label = 0;
  PixelIndex center;
};

/// Cuts the s x s window around (row, col) across all bands, mirror-padding
/// where it leaves the scene. `size` must be odd and the centre labeled.
PatchSample extract_patch(const HyperCube& cube, std::size_t row, std::size_t col,
                          std::size_t size);

/// Same window written into `out` (shape [s, s, S]) without allocation.
void extract_patch_into(const HyperCube& cube, std::size_t row, std::size_t col,
                        std::size_t size, std::span<float> out);

struct SplitSpec {
  /// Training samples per class; classes absent from the map contribute none.
  std::map<int, std::size_t> per_class_train;
  std::uint64_t seed = 0;

  /// `count` training samples for each of classes 1..num_classes.
  static SplitSpec uniform(int num_classes, std::size_t count, std::uint64_t seed);
  /// Indian Pines protocol: 10 for classes 1, 4, 7, 9, 13, 16 and 150 otherwise.
  static SplitSpec indian_pines(std::uint64_t seed);
};

struct Split {
  std::vector<PixelIndex> train;
  std::vector<PixelIndex> test;
};

/// Draws per-class training pixels uniformly without replacement; every other
/// labeled pixel goes to test.
Split split_train_test(const HyperCube& cube, const SplitSpec& spec);

}  // namespace rcnet::data
