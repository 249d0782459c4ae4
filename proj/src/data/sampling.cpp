#include "rcnet/data/sampling.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "rcnet/ops/window.hpp"

namespace rcnet::data {

namespace {

void check_patch_request(const HyperCube& cube, std::size_t row, std::size_t col,
                         std::size_t size) {
  if (size == 0 || size % 2 == 0) {
    fail(ErrorCode::kInvalidArgument, "extract_patch: patch size " + std::to_string(size) +
                                          " must be odd");
  }
  if (row >= cube.height || col >= cube.width) {
    fail(ErrorCode::kAxisOutOfRange, "extract_patch: centre outside the scene");
  }
  if (cube.label(row, col) == 0) {
    fail(ErrorCode::kInvalidArgument, "extract_patch: centre pixel (" + std::to_string(row) +
                                          "," + std::to_string(col) + ") is unlabeled");
  }
}

}  // namespace

void extract_patch_into(const HyperCube& cube, std::size_t row, std::size_t col,
                        std::size_t size, std::span<float> out) {
  check_patch_request(cube, row, col, size);
  require(out.size() == size * size * cube.bands, ErrorCode::kShapeMismatch,
          "extract_patch: output buffer has the wrong size");
  const long half = static_cast<long>(size / 2);
  std::size_t k = 0;
  for (long dr = -half; dr <= half; ++dr) {
    const std::size_t r = ops::reflect_index(static_cast<long>(row) + dr, cube.height);
    for (long dc = -half; dc <= half; ++dc) {
      const std::size_t c = ops::reflect_index(static_cast<long>(col) + dc, cube.width);
      const auto spectrum = cube.spectrum(r, c);
      std::copy(spectrum.begin(), spectrum.end(), out.begin() + k);
      k += cube.bands;
    }
  }
}

PatchSample extract_patch(const HyperCube& cube, std::size_t row, std::size_t col,
                          std::size_t size) {
  check_patch_request(cube, row, col, size);
  PatchSample sample{Tensor({size, size, cube.bands}), cube.label(row, col), {row, col}};
  extract_patch_into(cube, row, col, size, sample.cube.data());
  return sample;
}

SplitSpec SplitSpec::uniform(int num_classes, std::size_t count, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  for (int k = 1; k <= num_classes; ++k) spec.per_class_train[k] = count;
  return spec;
}

SplitSpec SplitSpec::indian_pines(std::uint64_t seed) {
  SplitSpec spec = uniform(16, 150, seed);
  for (int k : {1, 4, 7, 9, 13, 16}) spec.per_class_train[k] = 10;
  return spec;
}

Split split_train_test(const HyperCube& cube, const SplitSpec& spec) {
  const int k = static_cast<int>(cube.num_classes());
  std::vector<std::vector<PixelIndex>> by_class(static_cast<std::size_t>(k) + 1);
  for (std::size_t r = 0; r < cube.height; ++r) {
    for (std::size_t c = 0; c < cube.width; ++c) {
      const int label = cube.label(r, c);
      if (label > 0) by_class[static_cast<std::size_t>(label)].push_back({r, c});
    }
  }
  for (const auto& [label, count] : spec.per_class_train) {
    if (label < 1 || label > k) {
      fail(ErrorCode::kInvalidArgument, "split: class " + std::to_string(label) +
                                            " outside 1.." + std::to_string(k));
    }
    const std::size_t available = by_class[static_cast<std::size_t>(label)].size();
    if (count > available) {
      fail(ErrorCode::kInvalidArgument, "split: class " + std::to_string(label) + " has " +
                                            std::to_string(available) + " pixels, " +
                                            std::to_string(count) + " requested");
    }
  }

  std::mt19937_64 gen(spec.seed);
  Split split;
  std::vector<PixelIndex> test;
  for (int label = 1; label <= k; ++label) {
    auto& pixels = by_class[static_cast<std::size_t>(label)];
    const auto it = spec.per_class_train.find(label);
    const std::size_t n = it == spec.per_class_train.end() ? 0 : it->second;
    std::shuffle(pixels.begin(), pixels.end(), gen);
    split.train.insert(split.train.end(), pixels.begin(), pixels.begin() + static_cast<long>(n));
    test.insert(test.end(), pixels.begin() + static_cast<long>(n), pixels.end());
  }
  std::sort(test.begin(), test.end());
  split.test = std::move(test);
  return split;
}

}  // namespace rcnet::data
