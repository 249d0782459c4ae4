#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcnet/data/sampling.hpp"
#include "rcnet/model/config.hpp"
#include "rcnet/train/schedule.hpp"

namespace rcnet::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// How training pixels are drawn: "uniform" (per_class for every class),
/// "indian_pines", or "custom" (explicit per_class_train map).
struct SplitConfig {
  std::string protocol = "uniform";
  std::size_t per_class = 10;
  std::map<int, std::size_t> per_class_train;

  data::SplitSpec to_spec(std::size_t num_classes, std::uint64_t seed) const;
};

void to_json(nlohmann::json& j, const SplitConfig& s);
void from_json(const nlohmann::json& j, SplitConfig& s);

/// Contents of a --config file. `network` stays raw JSON until the dataset
/// fills in bands and class count.
struct RunConfig {
  nlohmann::json network = nlohmann::json::object();
  train::TrainConfig train;
  SplitConfig split;
  bool standardize = true;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Everything needed to replay a run.
struct RunManifest {
  std::string version = kArtifactVersion;
  std::uint64_t seed = 0;
  std::string dataset;
  std::string out_dir;
  model::NetworkConfig network;
  train::TrainConfig train;
  SplitConfig split;
  bool standardize = true;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

/// Parses `args` (without the program name) and runs one subcommand.
/// Returns the process exit status; failures write one JSON object to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcnet::cli
