#pragma once

#include <cstddef>
#include <cstdint>

#include <json.hpp>

namespace rcnet::train {

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t epochs = 300;
  double base_lr = 5e-4;
  double weight_decay = 1e-5;
  std::size_t warmup_epochs = 30;
  /// Warm-up starts at this fraction of base_lr.
  double warmup_start = 0.1;
  double lr_floor = 5e-6;
  std::uint64_t seed = 0;
  std::size_t patch_size = 27;
  /// Worker threads for per-sample gradients. Results are reproducible for a
  /// fixed thread count; changing it changes float summation order.
  std::size_t threads = 1;

  void validate() const;
};

/// Linear warm-up from warmup_start * base_lr over [0, warmup), then cosine
/// from base_lr to lr_floor over [warmup, epochs).
double lr_at(const TrainConfig& cfg, std::size_t epoch);

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

}  // namespace rcnet::train
