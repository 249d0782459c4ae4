#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "rcnet/ops/relconv3d.hpp"
#include "rcnet/ops/window.hpp"

namespace rcnet::model {

enum class BlockKind { kConv, kRc };

/// One residual block; its channel count is the owning stage's width.
struct BlockConfig {
  BlockKind kind = BlockKind::kConv;
  ops::Dims3 kernel{3, 3, 3};
};

struct StageConfig {
  /// Stride applied on every axis at stage entry.
  std::size_t downsample = 2;
  BlockKind downsample_kind = BlockKind::kConv;
  ops::Dims3 downsample_kernel{3, 3, 3};
  std::vector<BlockConfig> blocks;
  std::size_t out_channels = 32;
};

/// Spectral-compression stem: 1 -> channels expansion, then a strided
/// depthwise window.
struct StemConfig {
  std::size_t channels = 16;
  ops::Dims3 kernel{3, 3, 7};
  ops::Dims3 stride{1, 1, 2};
};

/// Knobs shared by every relational layer.
struct RcConfig {
  bool projections = true;
  ops::RelWeighting weighting = ops::RelWeighting::kPerChannel;
  std::size_t heads = 1;
};

inline constexpr std::size_t kNumStages = 4;

struct NetworkConfig {
  std::size_t patch_size = 27;
  std::size_t bands = 200;
  std::size_t num_classes = 16;
  StemConfig stem;
  std::array<StageConfig, kNumStages> stages;
  RcConfig rc;
  float norm_eps = 1e-5f;

  /// Conv blocks in stages 1-2, relational blocks in 3-4, [1,2,2,2] blocks,
  /// widths [32,64,128,256] after a 16-channel stem.
  static NetworkConfig standard(std::size_t patch_size, std::size_t bands,
                                std::size_t num_classes);

  /// Same layout with an 8-channel stem and widths [16,32,64,128].
  static NetworkConfig reduced(std::size_t patch_size, std::size_t bands,
                               std::size_t num_classes);

  /// Throws kInvalidArgument when an invariant is violated.
  void validate() const;

  /// [H, W, S] after the stem.
  ops::Dims3 stem_output() const;

  /// [H, W, S] after each stage.
  std::array<ops::Dims3, kNumStages> stage_outputs() const;
};

void to_json(nlohmann::json& j, const NetworkConfig& cfg);
void from_json(const nlohmann::json& j, NetworkConfig& cfg);

}  // namespace rcnet::model
