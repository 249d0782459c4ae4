#include "rcnet/model/config.hpp"

#include <string>

#include "rcnet/error.hpp"

namespace rcnet::model {

NLOHMANN_JSON_SERIALIZE_ENUM(BlockKind, {{BlockKind::kConv, "conv"}, {BlockKind::kRc, "rc"}})

}  // namespace rcnet::model

namespace rcnet::ops {

NLOHMANN_JSON_SERIALIZE_ENUM(RelWeighting, {{RelWeighting::kPerChannel, "per_channel"},
                                            {RelWeighting::kPerHead, "per_head"}})

}  // namespace rcnet::ops

namespace rcnet::model {

namespace {

ops::Dims3 ceil_div(ops::Dims3 d, ops::Dims3 stride) {
  return {(d[0] + stride[0] - 1) / stride[0], (d[1] + stride[1] - 1) / stride[1],
          (d[2] + stride[2] - 1) / stride[2]};
}

void check_odd(const ops::Dims3& k, const std::string& where) {
  for (std::size_t e : k) {
    if (e == 0 || e % 2 == 0) {
      fail(ErrorCode::kInvalidArgument, where + ": kernel extents must be odd");
    }
  }
}

}  // namespace

NetworkConfig NetworkConfig::standard(std::size_t patch_size, std::size_t bands,
                                      std::size_t num_classes) {
  NetworkConfig cfg;
  cfg.patch_size = patch_size;
  cfg.bands = bands;
  cfg.num_classes = num_classes;
  const std::array<std::size_t, kNumStages> widths{32, 64, 128, 256};
  const std::array<std::size_t, kNumStages> depth{1, 2, 2, 2};
  for (std::size_t s = 0; s < kNumStages; ++s) {
    const BlockKind kind = s < 2 ? BlockKind::kConv : BlockKind::kRc;
    cfg.stages[s].downsample_kind = kind;
    cfg.stages[s].out_channels = widths[s];
    cfg.stages[s].blocks.assign(depth[s], BlockConfig{kind, {3, 3, 3}});
  }
  return cfg;
}

NetworkConfig NetworkConfig::reduced(std::size_t patch_size, std::size_t bands,
                                     std::size_t num_classes) {
  NetworkConfig cfg = standard(patch_size, bands, num_classes);
  cfg.stem.channels = 8;
  const std::array<std::size_t, kNumStages> widths{16, 32, 64, 128};
  for (std::size_t s = 0; s < kNumStages; ++s) cfg.stages[s].out_channels = widths[s];
  return cfg;
}

ops::Dims3 NetworkConfig::stem_output() const {
  return ceil_div({patch_size, patch_size, bands}, stem.stride);
}

std::array<ops::Dims3, kNumStages> NetworkConfig::stage_outputs() const {
  std::array<ops::Dims3, kNumStages> out{};
  ops::Dims3 d = stem_output();
  for (std::size_t s = 0; s < kNumStages; ++s) {
    const std::size_t r = stages[s].downsample;
    d = ceil_div(d, {r, r, r});
    out[s] = d;
  }
  return out;
}

void NetworkConfig::validate() const {
  require(patch_size >= 1 && patch_size % 2 == 1, ErrorCode::kInvalidArgument,
          "network: patch size must be odd");
  require(bands >= 1, ErrorCode::kInvalidArgument, "network: bands must be >= 1");
  require(num_classes >= 1, ErrorCode::kInvalidArgument, "network: num_classes must be >= 1");
  require(stem.channels >= 1, ErrorCode::kInvalidArgument, "network: stem channels must be >= 1");
  check_odd(stem.kernel, "stem");
  for (std::size_t e : stem.stride) {
    require(e >= 1, ErrorCode::kInvalidArgument, "stem: stride must be >= 1");
  }
  // Stage s halves resolution, so the cumulative rate after stage s is 2^s.
  const std::size_t min_extent = std::size_t{1} << (kNumStages - 1);
  for (std::size_t e : stem_output()) {
    if (e < min_extent) {
      fail(ErrorCode::kInvalidArgument,
           "network: patch too small for the downsampling schedule (stem output extent " +
               std::to_string(e) + " < " + std::to_string(min_extent) + ")");
    }
  }
  for (std::size_t s = 0; s < kNumStages; ++s) {
    const StageConfig& st = stages[s];
    const std::string where = "stage" + std::to_string(s + 1);
    require(st.downsample == 2, ErrorCode::kInvalidArgument,
            where + ": downsample stride must be 2 (rates 2, 4, 8, 16)");
    require(st.out_channels >= 1, ErrorCode::kInvalidArgument, where + ": channels must be >= 1");
    check_odd(st.downsample_kernel, where + ".down");
    bool uses_rc = st.downsample_kind == BlockKind::kRc;
    for (const BlockConfig& b : st.blocks) {
      check_odd(b.kernel, where + ".block");
      uses_rc = uses_rc || b.kind == BlockKind::kRc;
    }
    if (uses_rc && rc.weighting == ops::RelWeighting::kPerHead) {
      require(rc.heads >= 1 && st.out_channels % rc.heads == 0 &&
                  (s == 0 ? stem.channels : stages[s - 1].out_channels) % rc.heads == 0,
              ErrorCode::kInvalidArgument, where + ": channels not divisible by rc heads");
    }
  }
}

void to_json(nlohmann::json& j, const NetworkConfig& cfg) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageConfig& st : cfg.stages) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const BlockConfig& b : st.blocks) blocks.push_back({{"kind", b.kind}, {"kernel", b.kernel}});
    stages.push_back({{"downsample", st.downsample},
                      {"downsample_kind", st.downsample_kind},
                      {"downsample_kernel", st.downsample_kernel},
                      {"out_channels", st.out_channels},
                      {"blocks", blocks}});
  }
  j = {{"patch_size", cfg.patch_size},
       {"bands", cfg.bands},
       {"num_classes", cfg.num_classes},
       {"stem",
        {{"channels", cfg.stem.channels}, {"kernel", cfg.stem.kernel}, {"stride", cfg.stem.stride}}},
       {"stages", stages},
       {"rc",
        {{"projections", cfg.rc.projections},
         {"weighting", cfg.rc.weighting},
         {"heads", cfg.rc.heads}}},
       {"norm_eps", cfg.norm_eps}};
}

void from_json(const nlohmann::json& j, NetworkConfig& cfg) {
  const std::string preset = j.value("preset", std::string("standard"));
  if (preset != "standard" && preset != "reduced") {
    fail(ErrorCode::kInvalidArgument, "network config: unknown preset '" + preset + "'");
  }
  const auto make = preset == "reduced" ? &NetworkConfig::reduced : &NetworkConfig::standard;
  NetworkConfig base = make(j.value("patch_size", std::size_t{27}), j.value("bands", std::size_t{200}),
                            j.value("num_classes", std::size_t{16}));
  if (j.contains("stem")) {
    const auto& s = j.at("stem");
    base.stem.channels = s.value("channels", base.stem.channels);
    base.stem.kernel = s.value("kernel", base.stem.kernel);
    base.stem.stride = s.value("stride", base.stem.stride);
  }
  if (j.contains("stages")) {
    const auto& stages = j.at("stages");
    if (!stages.is_array() || stages.size() != kNumStages) {
      fail(ErrorCode::kInvalidArgument, "network config: exactly 4 stages required");
    }
    for (std::size_t s = 0; s < kNumStages; ++s) {
      const auto& js = stages[s];
      StageConfig& st = base.stages[s];
      st.downsample = js.value("downsample", st.downsample);
      st.downsample_kind = js.value("downsample_kind", st.downsample_kind);
      st.downsample_kernel = js.value("downsample_kernel", st.downsample_kernel);
      st.out_channels = js.value("out_channels", st.out_channels);
      if (js.contains("blocks")) {
        st.blocks.clear();
        for (const auto& jb : js.at("blocks")) {
          st.blocks.push_back({jb.value("kind", BlockKind::kConv),
                               jb.value("kernel", ops::Dims3{3, 3, 3})});
        }
      }
    }
  }
  if (j.contains("rc")) {
    const auto& r = j.at("rc");
    base.rc.projections = r.value("projections", base.rc.projections);
    base.rc.weighting = r.value("weighting", base.rc.weighting);
    base.rc.heads = r.value("heads", base.rc.heads);
  }
  base.norm_eps = j.value("norm_eps", base.norm_eps);
  cfg = std::move(base);
}

}  // namespace rcnet::model
