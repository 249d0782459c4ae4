#include "rcnet/model/network.hpp"

#include <cmath>
#include <string>

#include "rcnet/autograd.hpp"
#include "rcnet/ops/conv3d.hpp"
#include "rcnet/ops/nn.hpp"
#include "rcnet/ops/relconv3d.hpp"

namespace rcnet::model {

template <typename T>
void BasicParameterStore<T>::add(std::string name, BasicTensor<T> value) {
  if (index_.count(name) != 0) {
    fail(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  }
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(value)});
}

template <typename T>
const BasicTensor<T>& BasicParameterStore<T>::get(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) fail(ErrorCode::kNotFound, "unknown parameter " + std::string(name));
  return entries_[it->second].value;
}

template <typename T>
BasicTensor<T>& BasicParameterStore<T>::get(std::string_view name) {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) fail(ErrorCode::kNotFound, "unknown parameter " + std::string(name));
  return entries_[it->second].value;
}

template <typename T>
bool BasicParameterStore<T>::contains(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

template <typename T>
std::size_t BasicParameterStore<T>::total_elements() const {
  std::size_t n = 0;
  for (const Entry& e : entries_) n += e.value.size();
  return n;
}

template class BasicParameterStore<float>;
template class BasicParameterStore<double>;

Var ParamVars::operator()(const std::string& name) const {
  const auto it = vars_.find(name);
  if (it == vars_.end()) fail(ErrorCode::kNotFound, "parameter not bound: " + name);
  return it->second;
}

template <typename T>
ParamVars bind_constants(Tape<T>& tape, const BasicParameterStore<T>& params) {
  ParamVars vars;
  for (const auto& e : params.entries()) vars.bind(e.name, tape.constant_ref(e.value));
  return vars;
}

template <typename T>
ParamVars bind_variables(Tape<T>& tape, const BasicParameterStore<T>& params,
                         std::vector<Var>* order) {
  ParamVars vars;
  for (const auto& e : params.entries()) {
    const Var v = tape.variable_ref(e.value);
    vars.bind(e.name, v);
    if (order != nullptr) order->push_back(v);
  }
  return vars;
}

namespace {

std::string stage_name(std::size_t s) { return "stage" + std::to_string(s + 1); }

std::string block_name(std::size_t s, std::size_t b) {
  return stage_name(s) + ".block" + std::to_string(b);
}

std::size_t stage_input_channels(const NetworkConfig& cfg, std::size_t s) {
  return s == 0 ? cfg.stem.channels : cfg.stages[s - 1].out_channels;
}

std::size_t volume(const ops::Dims3& d) { return d[0] * d[1] * d[2]; }

template <typename T>
Var normalize(Tape<T>& t, const ParamVars& p, const std::string& prefix, Var x, T eps) {
  const Shape& sh = t.value(x).shape();
  const Shape lead{sh[0], sh[1], sh[2]};
  Var h = ag::channel_standardize(t, x, eps);
  h = ag::mul(t, h, ag::expand(t, p(prefix + ".scale"), lead));
  return ag::add(t, h, ag::expand(t, p(prefix + ".shift"), lead));
}

template <typename T>
Var aggregate(Tape<T>& t, const NetworkConfig& cfg, const ParamVars& p,
              const std::string& prefix, BlockKind kind, const ops::Dims3& window,
              const ops::Dims3& stride, Var x, LayerProbes* probes) {
  if (probes != nullptr) (*probes)[prefix] = x;
  if (kind == BlockKind::kConv) {
    return ag::conv3d_depthwise(t, x, p(prefix + ".dw.kernel"), stride, ops::Padding::kSame);
  }
  const ops::RelConvOptions options{window, stride, ops::Padding::kSame, cfg.rc.weighting,
                                    cfg.rc.heads};
  std::optional<std::array<Var, 3>> proj;
  if (cfg.rc.projections) {
    proj = std::array<Var, 3>{p(prefix + ".rc.query"), p(prefix + ".rc.key"),
                              p(prefix + ".rc.value")};
  }
  return ag::relconv3d(t, x, options, proj);
}

}  // namespace

template <typename T>
Var forward_sample(Tape<T>& tape, const NetworkConfig& cfg, const ParamVars& p, Var patch,
                   LayerProbes* probes) {
  const Shape& ps = tape.value(patch).shape();
  if (ps != Shape{cfg.patch_size, cfg.patch_size, cfg.bands}) {
    fail(ErrorCode::kShapeMismatch, "forward: patch " + shape_to_string(ps) +
                                        " does not match config [" +
                                        std::to_string(cfg.patch_size) + "," +
                                        std::to_string(cfg.patch_size) + "," +
                                        std::to_string(cfg.bands) + "]");
  }
  const T eps = static_cast<T>(cfg.norm_eps);
  Var h = ag::reshape(tape, patch, {ps[0], ps[1], ps[2], 1});
  h = ag::conv3d_pointwise(tape, h, p("stem.expand.weight"), p("stem.expand.bias"));
  h = aggregate(tape, cfg, p, "stem", BlockKind::kConv, cfg.stem.kernel, cfg.stem.stride, h,
                probes);
  h = ag::silu(tape, h);

  for (std::size_t s = 0; s < kNumStages; ++s) {
    const StageConfig& st = cfg.stages[s];
    const std::string down = stage_name(s) + ".down";
    const std::size_t r = st.downsample;
    // Downsampling is not normalized: a per-sample norm here would strip the
    // channel means that carry the class evidence into the next stage.
    Var d = aggregate(tape, cfg, p, down, st.downsample_kind, st.downsample_kernel, {r, r, r}, h,
                      probes);
    h = ag::conv3d_pointwise(tape, d, p(down + ".pw.weight"), p(down + ".pw.bias"));
    for (std::size_t b = 0; b < st.blocks.size(); ++b) {
      const std::string name = block_name(s, b);
      Var branch = normalize(tape, p, name + ".norm", h, eps);
      branch = aggregate(tape, cfg, p, name, st.blocks[b].kind, st.blocks[b].kernel,
                         {1, 1, 1}, branch, probes);
      branch = ag::conv3d_pointwise(tape, branch, p(name + ".pw.weight"), p(name + ".pw.bias"));
      branch = ag::silu(tape, branch);
      h = ag::add(tape, h, branch);
    }
  }

  const std::size_t c = cfg.stages.back().out_channels;
  Var pooled = ag::reshape(tape, ag::global_avg_pool(tape, h), {1, 1, 1, c});
  Var logits = ag::conv3d_pointwise(tape, pooled, p("head.weight"), p("head.bias"));
  return ag::reshape(tape, logits, {cfg.num_classes});
}

std::vector<std::pair<std::string, LayerInfo>> aggregation_layers(const NetworkConfig& cfg) {
  std::vector<std::pair<std::string, LayerInfo>> out;
  out.push_back({"stem", {BlockKind::kConv, cfg.stem.kernel, cfg.stem.stride, "stem"}});
  for (std::size_t s = 0; s < kNumStages; ++s) {
    const StageConfig& st = cfg.stages[s];
    const std::string down = stage_name(s) + ".down";
    const std::size_t r = st.downsample;
    out.push_back({down, {st.downsample_kind, st.downsample_kernel, {r, r, r}, down}});
    for (std::size_t b = 0; b < st.blocks.size(); ++b) {
      const std::string name = block_name(s, b);
      out.push_back({name, {st.blocks[b].kind, st.blocks[b].kernel, {1, 1, 1}, name}});
    }
  }
  return out;
}

namespace {

complexity::MacCount aggregation_macs(BlockKind kind, const ops::Dims3& out,
                                      const ops::Dims3& window, std::size_t channels) {
  if (window[0] == window[1] && window[1] == window[2]) {
    const complexity::OpDims d{out[0], out[1], out[2], channels, window[0]};
    return kind == BlockKind::kConv ? complexity::macs_conv(d) : complexity::macs_rcblock(d);
  }
  complexity::MacCount m = complexity::MacCount(volume(out)) * volume(window) * channels;
  return kind == BlockKind::kConv ? m : 2 * m;
}

complexity::MacCount pointwise_macs(const ops::Dims3& at, std::size_t c_in, std::size_t c_out) {
  return complexity::MacCount(volume(at)) * c_in * c_out;
}

// Appends the norm (blocks only), aggregation and pointwise layers of one unit.
void add_unit_costs(std::vector<LayerCost>& layers, const NetworkConfig& cfg,
                    const std::string& prefix, BlockKind kind, const ops::Dims3& window,
                    const ops::Dims3& in, const ops::Dims3& out, std::size_t c_in,
                    std::size_t c_out, bool normed) {
  if (normed) layers.push_back({prefix + ".norm", "norm", in, c_in, 2 * c_in, 0, 0});
  LayerCost agg{prefix, kind == BlockKind::kConv ? "conv" : "rc", out, c_in, 0,
                aggregation_macs(kind, out, window, c_in), 0};
  if (kind == BlockKind::kConv) {
    agg.params = volume(window) * c_in;
  } else if (cfg.rc.projections) {
    agg.params = 3 * c_in * c_in;
    agg.extra_macs = 3 * pointwise_macs(in, c_in, c_in);
  }
  layers.push_back(agg);
  layers.push_back({prefix + ".pw", "pointwise", out, c_out, c_in * c_out + c_out, 0,
                    pointwise_macs(out, c_in, c_out)});
}

}  // namespace

std::vector<LayerCost> layer_costs(const NetworkConfig& cfg) {
  cfg.validate();
  std::vector<LayerCost> layers;
  const ops::Dims3 patch{cfg.patch_size, cfg.patch_size, cfg.bands};
  const std::size_t cs = cfg.stem.channels;
  layers.push_back({"stem.expand", "pointwise", patch, cs, 2 * cs, 0, pointwise_macs(patch, 1, cs)});
  const ops::Dims3 stem_out = cfg.stem_output();
  layers.push_back({"stem", "conv", stem_out, cs, volume(cfg.stem.kernel) * cs,
                    aggregation_macs(BlockKind::kConv, stem_out, cfg.stem.kernel, cs), 0});

  const auto outs = cfg.stage_outputs();
  ops::Dims3 dims = stem_out;
  for (std::size_t s = 0; s < kNumStages; ++s) {
    const StageConfig& st = cfg.stages[s];
    const std::size_t c_in = stage_input_channels(cfg, s);
    add_unit_costs(layers, cfg, stage_name(s) + ".down", st.downsample_kind,
                   st.downsample_kernel, dims, outs[s], c_in, st.out_channels, false);
    dims = outs[s];
    for (std::size_t b = 0; b < st.blocks.size(); ++b) {
      add_unit_costs(layers, cfg, block_name(s, b), st.blocks[b].kind, st.blocks[b].kernel,
                     dims, dims, st.out_channels, st.out_channels, true);
    }
  }
  const std::size_t c = cfg.stages.back().out_channels;
  layers.push_back({"head.pool", "pool", {1, 1, 1}, c, 0, 0, 0});
  layers.push_back({"head", "linear", {1, 1, 1}, cfg.num_classes, c * cfg.num_classes + cfg.num_classes,
                    0, complexity::MacCount(c) * cfg.num_classes});
  return layers;
}

MacsBreakdown sum_macs(const std::vector<LayerCost>& layers) {
  MacsBreakdown m{0, 0};
  for (const LayerCost& l : layers) {
    m.table += l.table_macs;
    m.extra += l.extra_macs;
  }
  return m;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Initializer {
 public:
  Initializer(ParameterStore& store, std::uint64_t seed) : store_(store), seed_(seed) {}

  void uniform(const std::string& name, Shape shape, std::size_t fan_in) {
    const float bound = std::sqrt(3.0f / static_cast<float>(fan_in));
    store_.add(name, Tensor::random_uniform(std::move(shape), next(), -bound, bound));
  }
  void constant(const std::string& name, Shape shape, float value) {
    next();
    store_.add(name, Tensor(std::move(shape), value));
  }
  void identity(const std::string& name, std::size_t c) {
    next();
    Tensor eye({c, c});
    for (std::size_t i = 0; i < c; ++i) eye[i * c + i] = 1.0f;
    store_.add(name, std::move(eye));
  }

 private:
  std::uint64_t next() { return mix_seed(seed_, counter_++); }

  ParameterStore& store_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

void init_unit(Initializer& init, const NetworkConfig& cfg, const std::string& prefix,
               BlockKind kind, const ops::Dims3& window, std::size_t c_in, std::size_t c_out,
               bool normed) {
  if (normed) {
    init.constant(prefix + ".norm.scale", {c_in}, 1.0f);
    init.constant(prefix + ".norm.shift", {c_in}, 0.0f);
  }
  if (kind == BlockKind::kConv) {
    init.uniform(prefix + ".dw.kernel", {window[0], window[1], window[2], c_in}, volume(window));
  } else if (cfg.rc.projections) {
    init.identity(prefix + ".rc.query", c_in);
    init.identity(prefix + ".rc.key", c_in);
    init.identity(prefix + ".rc.value", c_in);
  }
  init.uniform(prefix + ".pw.weight", {c_in, c_out}, c_in);
  init.constant(prefix + ".pw.bias", {c_out}, 0.0f);
}

}  // namespace

Network Network::build(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Network net;
  net.cfg_ = cfg;
  Initializer init(net.params_, seed);
  const std::size_t cs = cfg.stem.channels;
  init.uniform("stem.expand.weight", {1, cs}, 1);
  init.constant("stem.expand.bias", {cs}, 0.0f);
  const ops::Dims3& sk = cfg.stem.kernel;
  init.uniform("stem.dw.kernel", {sk[0], sk[1], sk[2], cs}, volume(sk));
  for (std::size_t s = 0; s < kNumStages; ++s) {
    const StageConfig& st = cfg.stages[s];
    init_unit(init, cfg, stage_name(s) + ".down", st.downsample_kind, st.downsample_kernel,
              stage_input_channels(cfg, s), st.out_channels, false);
    for (std::size_t b = 0; b < st.blocks.size(); ++b) {
      init_unit(init, cfg, block_name(s, b), st.blocks[b].kind, st.blocks[b].kernel,
                st.out_channels, st.out_channels, true);
    }
  }
  const std::size_t c = cfg.stages.back().out_channels;
  init.uniform("head.weight", {c, cfg.num_classes}, c);
  init.constant("head.bias", {cfg.num_classes}, 0.0f);
  return net;
}

Network build_network(const NetworkConfig& cfg, std::uint64_t seed) {
  return Network::build(cfg, seed);
}

Tensor Network::forward_one(const Tensor& patch) const {
  Tape<float> tape;
  const ParamVars vars = bind_constants(tape, params_);
  const Var x = tape.constant_ref(patch);
  return tape.value(forward_sample(tape, cfg_, vars, x));
}

Tensor Network::forward(const Tensor& batch) const {
  if (batch.rank() != 4 || batch.shape()[1] != cfg_.patch_size ||
      batch.shape()[2] != cfg_.patch_size || batch.shape()[3] != cfg_.bands) {
    fail(ErrorCode::kShapeMismatch, "forward: batch " + shape_to_string(batch.shape()) +
                                        " does not match [B," + std::to_string(cfg_.patch_size) +
                                        "," + std::to_string(cfg_.patch_size) + "," +
                                        std::to_string(cfg_.bands) + "]");
  }
  const std::size_t b = batch.shape()[0];
  const std::size_t per = batch.size() / b;
  Tensor logits({b, cfg_.num_classes});
  for (std::size_t i = 0; i < b; ++i) {
    Tensor patch({cfg_.patch_size, cfg_.patch_size, cfg_.bands},
                 std::vector<float>(batch.data().begin() + static_cast<long>(i * per),
                                    batch.data().begin() + static_cast<long>((i + 1) * per)));
    const Tensor out = forward_one(patch);
    std::copy(out.data().begin(), out.data().end(),
              logits.data().begin() + static_cast<long>(i * cfg_.num_classes));
  }
  return logits;
}

std::vector<NamedTensor> Network::snapshot() const {
  std::vector<NamedTensor> out;
  for (const auto& e : params_.entries()) out.push_back({e.name, e.value});
  return out;
}

void Network::load(const std::vector<NamedTensor>& tensors) {
  if (tensors.size() != params_.size()) {
    fail(ErrorCode::kConfigMismatch, "checkpoint has " + std::to_string(tensors.size()) +
                                         " tensors, architecture expects " +
                                         std::to_string(params_.size()));
  }
  for (const NamedTensor& t : tensors) {
    if (!params_.contains(t.name)) {
      fail(ErrorCode::kConfigMismatch, "checkpoint tensor " + t.name + " not in architecture");
    }
    if (params_.get(t.name).shape() != t.value.shape()) {
      fail(ErrorCode::kConfigMismatch, "checkpoint tensor " + t.name + " has shape " +
                                           shape_to_string(t.value.shape()) + ", expected " +
                                           shape_to_string(params_.get(t.name).shape()));
    }
  }
  for (const NamedTensor& t : tensors) params_.get(t.name) = t.value;
}

template ParamVars bind_constants<float>(Tape<float>&, const BasicParameterStore<float>&);
template ParamVars bind_constants<double>(Tape<double>&, const BasicParameterStore<double>&);
template ParamVars bind_variables<float>(Tape<float>&, const BasicParameterStore<float>&,
                                         std::vector<Var>*);
template ParamVars bind_variables<double>(Tape<double>&, const BasicParameterStore<double>&,
                                          std::vector<Var>*);
template Var forward_sample<float>(Tape<float>&, const NetworkConfig&, const ParamVars&, Var,
                                   LayerProbes*);
template Var forward_sample<double>(Tape<double>&, const NetworkConfig&, const ParamVars&, Var,
                                    LayerProbes*);

}  // namespace rcnet::model
