#include "rcnet/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "rcnet/autograd.hpp"
#include "rcnet/ops/nn.hpp"

namespace rcnet::train {

namespace {

int argmax_label(std::span<const float> logits) {
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin()) + 1;
}

std::vector<Tensor> zero_grads(const model::ParameterStore& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& e : params.entries()) out.emplace_back(e.value.shape());
  return out;
}

// Splits [0, n) into `parts` contiguous ranges.
std::vector<std::pair<std::size_t, std::size_t>> chunks(std::size_t n, std::size_t parts) {
  parts = std::max<std::size_t>(1, std::min(parts, n));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t p = 0; p < parts; ++p) out.emplace_back(n * p / parts, n * (p + 1) / parts);
  return out;
}

}  // namespace

TrainingDiverged::TrainingDiverged(std::size_t epoch, std::size_t batch, const std::string& detail)
    : Error(ErrorCode::kNumeric, "training diverged at epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(batch) + ": " + detail),
      epoch_(epoch),
      batch_(batch) {}

nlohmann::json epoch_log_json(const EpochLog& log) {
  return {{"epoch", log.epoch}, {"loss", log.loss}, {"train_acc", log.train_acc}, {"lr", log.lr}};
}

void check_compatible(const model::NetworkConfig& cfg, const data::HyperCube& cube) {
  if (cfg.num_classes != cube.num_classes()) {
    fail(ErrorCode::kConfigMismatch,
         "network has " + std::to_string(cfg.num_classes) + " classes, dataset has " +
             std::to_string(cube.num_classes()));
  }
  if (cfg.bands != cube.bands) {
    fail(ErrorCode::kConfigMismatch, "network expects " + std::to_string(cfg.bands) +
                                         " bands, dataset has " + std::to_string(cube.bands));
  }
}

double accumulate_gradients(const model::Network& net, const data::HyperCube& cube,
                            std::span<const data::PixelIndex> pixels, float scale,
                            std::vector<Tensor>& grads, std::size_t& correct) {
  const auto& cfg = net.config();
  const std::size_t s = cfg.patch_size;
  Tensor patch({s, s, cube.bands});
  double loss_sum = 0.0;
  correct = 0;
  for (const auto& px : pixels) {
    data::extract_patch_into(cube, px.row, px.col, s, patch.data());
    const int label = cube.label(px.row, px.col);

    Tape<float> tape;
    std::vector<Var> order;
    const model::ParamVars vars = model::bind_variables(tape, net.parameters(), &order);
    const Var x = tape.constant_ref(patch);
    const Var logits = model::forward_sample(tape, cfg, vars, x);
    const Var loss = ag::softmax_cross_entropy(
        tape, ag::reshape(tape, logits, {1, cfg.num_classes}), std::vector<int>{label});

    const float value = tape.value(loss)[0];
    loss_sum += value;
    if (argmax_label(tape.value(logits).data()) == label) ++correct;
    if (!std::isfinite(value)) continue;

    tape.backward(loss, scale);
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (!tape.has_grad(order[i])) continue;
      const Tensor& g = tape.grad_ref(order[i]);
      Tensor& acc = grads[i];
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g[k];
    }
  }
  return loss_sum;
}

TrainResult train(model::Network& net, const data::HyperCube& cube,
                  std::span<const data::PixelIndex> train_pixels, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  check_compatible(net.config(), cube);
  require(cfg.patch_size == net.config().patch_size, ErrorCode::kConfigMismatch,
          "train: patch_size differs from the network's");
  require(!train_pixels.empty() || cfg.epochs == 0, ErrorCode::kInvalidArgument,
          "train: no training samples");

  TrainResult result;
  result.best = net.snapshot();
  result.best_loss = std::numeric_limits<double>::infinity();

  std::vector<Tensor*> param_ptrs;
  for (auto& e : net.parameters().entries()) param_ptrs.push_back(&e.value);
  OptimizerState opt;

  std::vector<data::PixelIndex> order(train_pixels.begin(), train_pixels.end());
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = order.size();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(cfg, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct_sum = 0;

    for (std::size_t start = 0, batch = 0; start < n; start += cfg.batch_size, ++batch) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const std::span<const data::PixelIndex> batch_px(order.data() + start, end - start);
      const float scale = 1.0f / static_cast<float>(batch_px.size());

      const auto parts = chunks(batch_px.size(), cfg.threads);
      std::vector<std::vector<Tensor>> part_grads(parts.size());
      std::vector<double> part_loss(parts.size(), 0.0);
      std::vector<std::size_t> part_correct(parts.size(), 0);
      auto work = [&](std::size_t p) {
        part_grads[p] = zero_grads(net.parameters());
        part_loss[p] = accumulate_gradients(
            net, cube, batch_px.subspan(parts[p].first, parts[p].second - parts[p].first), scale,
            part_grads[p], part_correct[p]);
      };
      if (parts.size() == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t p = 0; p < parts.size(); ++p) pool.emplace_back(work, p);
        for (auto& t : pool) t.join();
      }

      std::vector<Tensor>& grads = part_grads[0];
      for (std::size_t p = 1; p < parts.size(); ++p) {
        for (std::size_t i = 0; i < grads.size(); ++i) {
          for (std::size_t k = 0; k < grads[i].size(); ++k) grads[i][k] += part_grads[p][i][k];
        }
      }
      double batch_loss = 0.0;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        batch_loss += part_loss[p];
        correct_sum += part_correct[p];
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged(epoch, batch, "non-finite loss");
      }
      loss_sum += batch_loss;
      try {
        adamw_step(param_ptrs, grads, opt, lr, cfg.weight_decay);
      } catch (const Error& e) {
        throw TrainingDiverged(epoch, batch, e.what());
      }
    }

    EpochLog entry{epoch, loss_sum / static_cast<double>(n),
                   static_cast<double>(correct_sum) / static_cast<double>(n), lr};
    result.log.push_back(entry);
    if (entry.loss < result.best_loss) {
      result.best_loss = entry.loss;
      result.best_epoch = epoch;
      result.best = net.snapshot();
    }
    if (on_epoch) on_epoch(entry);
  }
  result.final_params = net.snapshot();
  return result;
}

std::vector<int> predict(const model::Network& net, const data::HyperCube& cube,
                         std::span<const data::PixelIndex> pixels, std::size_t threads) {
  check_compatible(net.config(), cube);
  std::vector<int> out(pixels.size(), 0);
  const std::size_t s = net.config().patch_size;
  auto work = [&](std::size_t begin, std::size_t end) {
    Tensor patch({s, s, cube.bands});
    for (std::size_t i = begin; i < end; ++i) {
      data::extract_patch_into(cube, pixels[i].row, pixels[i].col, s, patch.data());
      out[i] = argmax_label(net.forward_one(patch).data());
    }
  };
  const auto parts = chunks(pixels.size(), threads);
  if (parts.size() <= 1) {
    work(0, pixels.size());
  } else {
    std::vector<std::thread> pool;
    for (const auto& [b, e] : parts) pool.emplace_back(work, b, e);
    for (auto& t : pool) t.join();
  }
  return out;
}

metrics::ConfusionMatrix evaluate(const model::Network& net, const data::HyperCube& cube,
                                  std::span<const data::PixelIndex> pixels,
                                  std::size_t threads) {
  const std::vector<int> pred = predict(net, cube, pixels, threads);
  metrics::ConfusionMatrix cm(cube.num_classes());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    cm.add(cube.label(pixels[i].row, pixels[i].col), pred[i]);
  }
  return cm;
}

}  // namespace rcnet::train
