#include "rcnet/train/schedule.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rcnet/error.hpp"

namespace rcnet::train {

void TrainConfig::validate() const {
  require(batch_size >= 1, ErrorCode::kInvalidArgument, "train: batch_size must be >= 1");
  require(epochs == 0 || warmup_epochs < epochs, ErrorCode::kInvalidArgument,
          "train: warmup_epochs must be < epochs");
  require(lr_floor < base_lr, ErrorCode::kInvalidArgument, "train: lr_floor must be < base_lr");
  require(base_lr > 0.0 && lr_floor >= 0.0, ErrorCode::kInvalidArgument,
          "train: learning rates must be positive");
  require(warmup_start > 0.0 && warmup_start <= 1.0, ErrorCode::kInvalidArgument,
          "train: warmup_start must be in (0, 1]");
  require(weight_decay >= 0.0, ErrorCode::kInvalidArgument, "train: weight_decay must be >= 0");
  require(threads >= 1, ErrorCode::kInvalidArgument, "train: threads must be >= 1");
  require(patch_size % 2 == 1, ErrorCode::kInvalidArgument, "train: patch_size must be odd");
}

double lr_at(const TrainConfig& cfg, std::size_t epoch) {
  if (epoch >= cfg.epochs) {
    fail(ErrorCode::kAxisOutOfRange, "lr_at: epoch " + std::to_string(epoch) +
                                         " outside [0, " + std::to_string(cfg.epochs) + ")");
  }
  if (epoch < cfg.warmup_epochs) {
    const double frac = static_cast<double>(epoch) / static_cast<double>(cfg.warmup_epochs);
    return cfg.base_lr * (cfg.warmup_start + (1.0 - cfg.warmup_start) * frac);
  }
  const double t = static_cast<double>(epoch - cfg.warmup_epochs) /
                   static_cast<double>(cfg.epochs - cfg.warmup_epochs);
  return cfg.lr_floor +
         0.5 * (cfg.base_lr - cfg.lr_floor) * (1.0 + std::cos(std::numbers::pi * t));
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = {{"batch_size", cfg.batch_size},   {"epochs", cfg.epochs},
       {"base_lr", cfg.base_lr},         {"weight_decay", cfg.weight_decay},
       {"warmup_epochs", cfg.warmup_epochs}, {"warmup_start", cfg.warmup_start},
       {"lr_floor", cfg.lr_floor},       {"seed", cfg.seed},
       {"patch_size", cfg.patch_size},   {"threads", cfg.threads}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  TrainConfig d;
  cfg.batch_size = j.value("batch_size", d.batch_size);
  cfg.epochs = j.value("epochs", d.epochs);
  cfg.base_lr = j.value("base_lr", d.base_lr);
  cfg.weight_decay = j.value("weight_decay", d.weight_decay);
  cfg.warmup_epochs = j.value("warmup_epochs", d.warmup_epochs);
  cfg.warmup_start = j.value("warmup_start", d.warmup_start);
  cfg.lr_floor = j.value("lr_floor", d.lr_floor);
  cfg.seed = j.value("seed", d.seed);
  cfg.patch_size = j.value("patch_size", d.patch_size);
  cfg.threads = j.value("threads", d.threads);
}

}  // namespace rcnet::train
