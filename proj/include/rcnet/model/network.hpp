#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcnet/checkpoint.hpp"
#include "rcnet/complexity.hpp"
#include "rcnet/model/config.hpp"
#include "rcnet/tape.hpp"

namespace rcnet::model {

/// Named parameters in a fixed order; the order is the checkpoint order.
template <typename T>
class BasicParameterStore {
 public:
  struct Entry {
    std::string name;
    BasicTensor<T> value;
  };

  void add(std::string name, BasicTensor<T> value);

  const BasicTensor<T>& get(std::string_view name) const;
  BasicTensor<T>& get(std::string_view name);
  bool contains(std::string_view name) const;

  std::vector<Entry>& entries() noexcept { return entries_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t total_elements() const;

  template <typename U>
  BasicParameterStore<U> cast() const {
    BasicParameterStore<U> out;
    for (const Entry& e : entries_) out.add(e.name, e.value.template cast<U>());
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

using ParameterStore = BasicParameterStore<float>;

/// Parameter name -> tape handle for one forward pass.
class ParamVars {
 public:
  void bind(const std::string& name, Var v) { vars_[name] = v; }
  Var operator()(const std::string& name) const;

 private:
  std::unordered_map<std::string, Var> vars_;
};

template <typename T>
ParamVars bind_constants(Tape<T>& tape, const BasicParameterStore<T>& params);
template <typename T>
ParamVars bind_variables(Tape<T>& tape, const BasicParameterStore<T>& params,
                         std::vector<Var>* order = nullptr);

/// Aggregation inputs captured during a forward pass, keyed by layer id
/// ("stem", "stage3.down", "stage1.block0", ...).
using LayerProbes = std::map<std::string, Var>;

/// Runs one [s, s, L] patch through stem, stages and head; returns logits [K].
template <typename T>
Var forward_sample(Tape<T>& tape, const NetworkConfig& cfg, const ParamVars& params,
                   Var patch, LayerProbes* probes = nullptr);

/// Per-layer cost accounting. `table_macs` is the aggregation term the
/// closed-form table counts; `extra_macs` covers pointwise maps,
/// projections and the classifier (the beyond-table terms).
struct LayerCost {
  std::string name;
  std::string kind;
  ops::Dims3 output{};
  std::size_t channels = 0;
  std::size_t params = 0;
  complexity::MacCount table_macs;
  complexity::MacCount extra_macs;
};

std::vector<LayerCost> layer_costs(const NetworkConfig& cfg);

struct MacsBreakdown {
  complexity::MacCount table;
  complexity::MacCount extra;
  complexity::MacCount total() const { return table + extra; }
};

MacsBreakdown sum_macs(const std::vector<LayerCost>& layers);

/// Which op each layer id resolves to, for kernel dumps.
struct LayerInfo {
  BlockKind kind;
  ops::Dims3 window;
  ops::Dims3 stride;
  std::string param_prefix;
};

/// Aggregation layers in forward order.
std::vector<std::pair<std::string, LayerInfo>> aggregation_layers(const NetworkConfig& cfg);

class Network {
 public:
  /// Validates the config and initializes parameters deterministically from
  /// `seed`.
  static Network build(const NetworkConfig& cfg, std::uint64_t seed);

  const NetworkConfig& config() const noexcept { return cfg_; }
  const ParameterStore& parameters() const noexcept { return params_; }
  ParameterStore& parameters() noexcept { return params_; }

  /// [B, s, s, L] -> logits [B, K].
  Tensor forward(const Tensor& batch) const;

  /// Logits [K] for one [s, s, L] patch.
  Tensor forward_one(const Tensor& patch) const;

  std::size_t param_count() const { return params_.total_elements(); }

  /// Table-formula aggregation MACs plus beyond-table terms for one sample.
  MacsBreakdown macs_estimate() const { return sum_macs(layer_costs(cfg_)); }

  std::vector<NamedTensor> snapshot() const;

  /// Replaces parameters; names and shapes must match this architecture.
  void load(const std::vector<NamedTensor>& tensors);

 private:
  NetworkConfig cfg_;
  ParameterStore params_;
};

Network build_network(const NetworkConfig& cfg, std::uint64_t seed);

extern template class BasicParameterStore<float>;
extern template class BasicParameterStore<double>;

}  // namespace rcnet::model
