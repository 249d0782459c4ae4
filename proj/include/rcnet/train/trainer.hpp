#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rcnet/checkpoint.hpp"
#include "rcnet/data/sampling.hpp"
#include "rcnet/metrics.hpp"
#include "rcnet/model/network.hpp"
#include "rcnet/train/adamw.hpp"
#include "rcnet/train/schedule.hpp"

namespace rcnet::train {

struct EpochLog {
  std::size_t epoch = 0;
  /// Mean per-sample loss observed during the epoch.
  double loss = 0.0;
  /// Fraction of samples classified correctly at their forward pass.
  double train_acc = 0.0;
  double lr = 0.0;
};

nlohmann::json epoch_log_json(const EpochLog& log);

struct TrainResult {
  std::vector<EpochLog> log;
  std::vector<NamedTensor> best;
  std::vector<NamedTensor> final_params;
  double best_loss = 0.0;
  std::size_t best_epoch = 0;
};

/// Thrown when a loss or gradient stops being finite. The network keeps the
/// parameters of the last completed step.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t batch, const std::string& detail);
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch AdamW on patches around `train_pixels`. Each epoch draws a
/// fresh permutation from a generator seeded once with cfg.seed. Gradients
/// are computed per sample and averaged over the batch.
TrainResult train(model::Network& net, const data::HyperCube& cube,
                  std::span<const data::PixelIndex> train_pixels, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Sum of per-sample gradients for `pixels` scaled by `scale`, in parameter
/// order. Returns the summed loss and writes the number of correct
/// predictions to `correct`.
double accumulate_gradients(const model::Network& net, const data::HyperCube& cube,
                            std::span<const data::PixelIndex> pixels, float scale,
                            std::vector<Tensor>& grads, std::size_t& correct);

/// 1-based predicted class for each pixel.
std::vector<int> predict(const model::Network& net, const data::HyperCube& cube,
                         std::span<const data::PixelIndex> pixels, std::size_t threads = 1);

metrics::ConfusionMatrix evaluate(const model::Network& net, const data::HyperCube& cube,
                                  std::span<const data::PixelIndex> pixels,
                                  std::size_t threads = 1);

/// Throws kConfigMismatch when the network cannot consume this scene.
void check_compatible(const model::NetworkConfig& cfg, const data::HyperCube& cube);

}  // namespace rcnet::train
