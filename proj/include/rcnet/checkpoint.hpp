#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rcnet/tensor.hpp"

namespace rcnet {

struct NamedTensor {
  std::string name;
  Tensor value;
};

/// Checkpoint layout: one UTF-8 JSON line, an ordered array of
/// {"name": ..., "shape": [...]}, followed by the tensors' float32 values,
/// little-endian, concatenated in header order.
void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

}  // namespace rcnet
