#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rcnet/tensor.hpp"

namespace rcnet::data {

/// Labeled hyperspectral scene. Radiance is [H, W, S] with bands innermost;
/// labels are a row-major H x W grid where 0 means unlabeled and 1..K are
/// classes.
struct HyperCube {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;
  Tensor radiance;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  int label(std::size_t row, std::size_t col) const { return labels[row * width + col]; }
  std::span<const float> spectrum(std::size_t row, std::size_t col) const {
    return radiance.data().subspan((row * width + col) * bands, bands);
  }

  /// Throws kFormat when shapes or label range are inconsistent.
  void validate() const;

  /// Number of labeled pixels per class, index 0 unused.
  std::vector<std::size_t> class_counts() const;
};

/// HSICUBE: a JSON header line {"h","w","s","k","class_names"} then H*W*S
/// float32 radiance values and H*W int16 labels, both little-endian.
HyperCube load_hypercube(const std::filesystem::path& path);
void save_hypercube(const std::filesystem::path& path, const HyperCube& cube);

/// Builds a cube from the plain-text triplet: a dims file ("H W S [K]" then
/// optional class names, one per line), a CSV with one row of S values per
/// pixel in row-major order, and a CSV label grid of H rows by W columns.
HyperCube ingest_triplet(const std::filesystem::path& dims_path,
                         const std::filesystem::path& values_csv,
                         const std::filesystem::path& labels_csv);

/// Standardizes each band to zero mean and unit population std using
/// labeled pixels only. Zero-variance bands become all zeros.
HyperCube standardize_bands(const HyperCube& cube);

}  // namespace rcnet::data
