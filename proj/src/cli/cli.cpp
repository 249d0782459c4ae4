#include "rcnet/cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <locale>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rcnet/checkpoint.hpp"
#include "rcnet/complexity.hpp"
#include "rcnet/data/hypercube.hpp"
#include "rcnet/metrics.hpp"
#include "rcnet/model/network.hpp"
#include "rcnet/ops/conv3d.hpp"
#include "rcnet/train/trainer.hpp"

namespace rcnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

data::SplitSpec SplitConfig::to_spec(std::size_t num_classes, std::uint64_t seed) const {
  if (protocol == "uniform") {
    return data::SplitSpec::uniform(static_cast<int>(num_classes), per_class, seed);
  }
  if (protocol == "indian_pines") return data::SplitSpec::indian_pines(seed);
  if (protocol == "custom") return data::SplitSpec{per_class_train, seed};
  fail(ErrorCode::kInvalidArgument, "split: unknown protocol '" + protocol + "'");
}

void to_json(json& j, const SplitConfig& s) {
  json counts = json::object();
  for (const auto& [cls, n] : s.per_class_train) counts[std::to_string(cls)] = n;
  j = {{"protocol", s.protocol}, {"per_class", s.per_class}, {"per_class_train", counts}};
}

void from_json(const json& j, SplitConfig& s) {
  SplitConfig d;
  s.protocol = j.value("protocol", d.protocol);
  s.per_class = j.value("per_class", d.per_class);
  s.per_class_train.clear();
  if (j.contains("per_class_train")) {
    for (const auto& [key, n] : j.at("per_class_train").items()) {
      s.per_class_train[std::stoi(key)] = n.get<std::size_t>();
    }
  }
}

void to_json(json& j, const RunManifest& m) {
  j = {{"version", m.version},  {"seed", m.seed},   {"dataset", m.dataset},
       {"out_dir", m.out_dir},  {"network", m.network}, {"train", m.train},
       {"split", m.split},      {"standardize", m.standardize}};
}

void from_json(const json& j, RunManifest& m) {
  m.version = j.at("version").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.dataset = j.at("dataset").get<std::string>();
  m.out_dir = j.value("out_dir", std::string{});
  m.network = j.at("network").get<model::NetworkConfig>();
  m.train = j.at("train").get<train::TrainConfig>();
  m.split = j.at("split").get<SplitConfig>();
  m.standardize = j.value("standardize", true);
}

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(9);
  return os;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  const json j = read_json_file(path);
  RunConfig rc;
  try {
    if (j.contains("network")) rc.network = j.at("network");
    if (j.contains("train")) rc.train = j.at("train").get<train::TrainConfig>();
    if (j.contains("split")) rc.split = j.at("split").get<SplitConfig>();
    rc.standardize = j.value("standardize", true);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return rc;
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Seed for every random choice");
  app->add_option("--config", c.config, "JSON run configuration");
  app->add_option("--out", c.out, "Output directory");
}

RunConfig config_or_default(const Common& c) {
  return c.config.empty() ? RunConfig{} : load_run_config(c.config);
}

data::HyperCube load_for_run(const std::string& path, bool standardize) {
  data::HyperCube cube = data::load_hypercube(path);
  return standardize ? data::standardize_bands(cube) : cube;
}

/// Network config with bands and classes defaulted from the dataset.
model::NetworkConfig resolve_network(json net, const data::HyperCube* cube,
                                     std::optional<std::size_t> patch) {
  if (cube != nullptr) {
    if (!net.contains("bands")) net["bands"] = cube->bands;
    if (!net.contains("num_classes")) net["num_classes"] = cube->num_classes();
  }
  if (patch) net["patch_size"] = *patch;
  model::NetworkConfig cfg;
  try {
    cfg = net.get<model::NetworkConfig>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("network config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json split_summary(const data::HyperCube& cube, const data::Split& split) {
  json train_counts = json::object();
  json test_counts = json::object();
  for (std::size_t k = 1; k <= cube.num_classes(); ++k) {
    train_counts[std::to_string(k)] = 0;
    test_counts[std::to_string(k)] = 0;
  }
  for (const auto& p : split.train) {
    auto& n = train_counts[std::to_string(cube.label(p.row, p.col))];
    n = n.get<std::size_t>() + 1;
  }
  for (const auto& p : split.test) {
    auto& n = test_counts[std::to_string(cube.label(p.row, p.col))];
    n = n.get<std::size_t>() + 1;
  }
  return {{"train_total", split.train.size()},
          {"test_total", split.test.size()},
          {"train_per_class", train_counts},
          {"test_per_class", test_counts}};
}

json pixels_json(const std::vector<data::PixelIndex>& px) {
  json arr = json::array();
  for (const auto& p : px) arr.push_back({p.row, p.col});
  return arr;
}

// ---- ingest -----------------------------------------------------------------

struct IngestArgs {
  Common common;
  std::string dims, values, labels, name = "cube.hsicube";
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  const data::HyperCube cube = data::ingest_triplet(a.dims, a.values, a.labels);
  const fs::path dir = a.common.out.empty() ? fs::path(".") : fs::path(a.common.out);
  fs::create_directories(dir);
  const fs::path path = dir / a.name;
  data::save_hypercube(path, cube);
  data::load_hypercube(path);
  out << json{{"path", path.string()},
              {"height", cube.height},
              {"width", cube.width},
              {"bands", cube.bands},
              {"num_classes", cube.num_classes()}}
             .dump()
      << "\n";
  return 0;
}

// ---- split ------------------------------------------------------------------

struct SplitArgs {
  Common common;
  std::string data;
  std::optional<std::string> protocol;
  std::optional<std::size_t> per_class;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  RunConfig rc = config_or_default(a.common);
  if (a.protocol) rc.split.protocol = *a.protocol;
  if (a.per_class) rc.split.per_class = *a.per_class;
  const data::HyperCube cube = data::load_hypercube(a.data);
  const data::Split split =
      data::split_train_test(cube, rc.split.to_spec(cube.num_classes(), a.common.seed));
  json summary = split_summary(cube, split);
  summary["seed"] = a.common.seed;
  summary["protocol"] = rc.split.protocol;
  if (!a.common.out.empty()) {
    json full = summary;
    full["train"] = pixels_json(split.train);
    full["test"] = pixels_json(split.test);
    write_text(fs::path(a.common.out) / "split.json", full.dump() + "\n");
  }
  out << summary.dump() << "\n";
  return 0;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string data;
  std::optional<std::size_t> epochs, batch_size, threads, patch_size, warmup;
  std::optional<double> lr;
  std::optional<std::string> preset;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  require(!a.common.out.empty(), ErrorCode::kInvalidArgument, "train: --out is required");
  RunConfig rc = config_or_default(a.common);
  if (a.epochs) rc.train.epochs = *a.epochs;
  if (a.batch_size) rc.train.batch_size = *a.batch_size;
  if (a.threads) rc.train.threads = *a.threads;
  if (a.warmup) rc.train.warmup_epochs = *a.warmup;
  if (a.lr) rc.train.base_lr = *a.lr;
  if (a.preset) rc.network["preset"] = *a.preset;
  if (a.patch_size) rc.train.patch_size = *a.patch_size;
  else if (rc.network.contains("patch_size")) rc.train.patch_size = rc.network["patch_size"];
  rc.train.seed = a.common.seed;

  RunManifest m;
  m.seed = a.common.seed;
  m.dataset = fs::absolute(a.data).string();
  m.out_dir = fs::absolute(a.common.out).string();
  m.train = rc.train;
  m.split = rc.split;
  m.standardize = rc.standardize;

  const data::HyperCube cube = load_for_run(a.data, rc.standardize);
  m.network = resolve_network(rc.network, &cube, rc.train.patch_size);
  m.train.validate();

  const fs::path dir(a.common.out);
  fs::create_directories(dir);
  write_text(dir / "manifest.json", json(m).dump(2) + "\n");

  const data::Split split = data::split_train_test(cube, m.split.to_spec(cube.num_classes(), m.seed));
  json split_doc = split_summary(cube, split);
  split_doc["train"] = pixels_json(split.train);
  write_text(dir / "split.json", split_doc.dump() + "\n");

  model::Network net = model::build_network(m.network, m.seed);
  std::ofstream log(dir / "train_log.jsonl", std::ios::binary);
  if (!log) fail(ErrorCode::kIo, "cannot write train_log.jsonl");
  train::TrainResult result;
  try {
    result = train::train(net, cube, split.train, m.train, [&](const train::EpochLog& e) {
      log << train::epoch_log_json(e).dump() << "\n";
      log.flush();
    });
  } catch (const train::TrainingDiverged& e) {
    const json diag{{"error", error_code_name(e.code())},
                    {"message", e.what()},
                    {"epoch", e.epoch()},
                    {"batch", e.batch()}};
    write_text(dir / "divergence.json", diag.dump() + "\n");
    err << diag.dump() << "\n";
    return 1;
  }
  save_checkpoint(dir / "checkpoint_final.bin", result.final_params);
  save_checkpoint(dir / "checkpoint_best.bin", result.best);

  json summary{{"out", dir.string()},
               {"epochs", result.log.size()},
               {"params", net.param_count()},
               {"train_samples", split.train.size()}};
  if (!result.log.empty()) {
    summary["final_loss"] = result.log.back().loss;
    summary["final_train_acc"] = result.log.back().train_acc;
    summary["best_loss"] = result.best_loss;
    summary["best_epoch"] = result.best_epoch;
  }
  out << summary.dump() << "\n";
  return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string manifest;
  std::optional<std::string> checkpoint, data;
  std::size_t threads = 1;
  bool predictions = false;
};

RunManifest read_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    return j.get<RunManifest>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const RunManifest m = read_manifest(a.manifest);
  const fs::path run_dir = fs::path(a.manifest).parent_path();
  const fs::path ckpt = a.checkpoint ? fs::path(*a.checkpoint) : run_dir / "checkpoint_final.bin";
  const data::HyperCube cube = load_for_run(a.data.value_or(m.dataset), m.standardize);
  train::check_compatible(m.network, cube);

  model::Network net = model::build_network(m.network, m.seed);
  net.load(load_checkpoint(ckpt));
  const data::Split split = data::split_train_test(cube, m.split.to_spec(cube.num_classes(), m.seed));
  const std::vector<int> pred = train::predict(net, cube, split.test, a.threads);

  metrics::ConfusionMatrix cm(cube.num_classes());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    cm.add(cube.label(split.test[i].row, split.test[i].col), pred[i]);
  }
  json report = metrics::report_to_json(metrics::compute_report(cm));
  json rows = json::array();
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < cm.num_classes(); ++j) row.push_back(cm.at(i, j));
    rows.push_back(row);
  }
  report["confusion"] = rows;
  report["test_samples"] = split.test.size();

  const fs::path dir = a.common.out.empty() ? run_dir : fs::path(a.common.out);
  write_text(dir / "metrics.json", report.dump(2) + "\n");
  if (a.predictions) {
    std::ostringstream os = csv_stream();
    os << "row,col,label,predicted\n";
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const auto& p = split.test[i];
      os << p.row << ',' << p.col << ',' << cube.label(p.row, p.col) << ',' << pred[i] << '\n';
    }
    write_text(dir / "predictions.csv", os.str());
  }
  out << report.dump() << "\n";
  return 0;
}

// ---- macs -------------------------------------------------------------------

struct MacsArgs {
  Common common;
  std::vector<std::size_t> ns{27, 28, 64, 512, 3375, 19683}, cs{16, 32, 64, 128, 256}, ks{3, 5, 7};
  std::optional<std::size_t> bands, classes, patch;
};

int cmd_macs(const MacsArgs& a, std::ostream& out) {
  std::ostringstream os = csv_stream();
  if (a.common.config.empty()) {
    complexity::write_macs_sweep(os, a.ns, a.cs, a.ks);
  } else {
    json net = load_run_config(a.common.config).network;
    if (a.bands) net["bands"] = *a.bands;
    if (a.classes) net["num_classes"] = *a.classes;
    const model::NetworkConfig cfg = resolve_network(net, nullptr, a.patch);
    const auto layers = model::layer_costs(cfg);
    os << "layer,kind,h,w,s,channels,params,table_macs,extra_macs\n";
    std::size_t params = 0;
    for (const auto& l : layers) {
      os << l.name << ',' << l.kind << ',' << l.output[0] << ',' << l.output[1] << ','
         << l.output[2] << ',' << l.channels << ',' << l.params << ',' << l.table_macs << ','
         << l.extra_macs << '\n';
      params += l.params;
    }
    const model::MacsBreakdown sum = model::sum_macs(layers);
    os << "total,,,,,," << params << ',' << sum.table << ',' << sum.extra << '\n';
  }
  if (!a.common.out.empty()) write_text(fs::path(a.common.out) / "macs.csv", os.str());
  out << os.str();
  return 0;
}

// ---- kernel-dump ------------------------------------------------------------

struct KernelDumpArgs {
  Common common;
  std::string layer;
  std::optional<std::string> manifest, checkpoint, data;
  std::vector<std::size_t> pixel;
  std::string input = "random";
  float value = 1.0f;
  std::vector<std::size_t> pos_a, pos_b;
  std::optional<std::size_t> bands, classes, patch;
};

ops::Dims3 to_dims(const std::vector<std::size_t>& v, const char* what) {
  require(v.size() == 3, ErrorCode::kInvalidArgument,
          std::string(what) + ": expected three comma-separated values");
  return {v[0], v[1], v[2]};
}

int cmd_kernel_dump(const KernelDumpArgs& a, std::ostream& out) {
  std::optional<data::HyperCube> cube;
  model::NetworkConfig cfg;
  std::uint64_t seed = a.common.seed;
  std::optional<fs::path> ckpt = a.checkpoint ? std::optional<fs::path>(*a.checkpoint) : std::nullopt;
  if (a.manifest) {
    const RunManifest m = read_manifest(*a.manifest);
    cfg = m.network;
    seed = m.seed;
    if (!ckpt) ckpt = fs::path(*a.manifest).parent_path() / "checkpoint_final.bin";
    if (a.data) cube = load_for_run(*a.data, m.standardize);
  } else {
    const RunConfig rc = config_or_default(a.common);
    if (a.data) cube = load_for_run(*a.data, rc.standardize);
    json net = rc.network;
    if (a.bands) net["bands"] = *a.bands;
    if (a.classes) net["num_classes"] = *a.classes;
    cfg = resolve_network(net, cube ? &*cube : nullptr, a.patch);
  }

  const auto layers = model::aggregation_layers(cfg);
  const auto it = std::find_if(layers.begin(), layers.end(),
                               [&](const auto& l) { return l.first == a.layer; });
  if (it == layers.end()) {
    std::string known;
    for (const auto& l : layers) known += (known.empty() ? "" : ", ") + l.first;
    fail(ErrorCode::kNotFound, "unknown layer id '" + a.layer + "' (known: " + known + ")");
  }
  const model::LayerInfo& info = it->second;

  model::Network net = model::build_network(cfg, seed);
  if (ckpt) net.load(load_checkpoint(*ckpt));

  const std::size_t s = cfg.patch_size;
  Tensor patch({s, s, cfg.bands});
  if (!a.pixel.empty()) {
    require(cube.has_value(), ErrorCode::kInvalidArgument, "kernel-dump: --pixel needs --data");
    train::check_compatible(cfg, *cube);
    require(a.pixel.size() == 2, ErrorCode::kInvalidArgument, "kernel-dump: --pixel expects row,col");
    patch = data::extract_patch(*cube, a.pixel[0], a.pixel[1], s).cube;
  } else if (a.input == "random") {
    patch = Tensor::random_normal({s, s, cfg.bands}, a.common.seed);
  } else if (a.input == "constant") {
    patch.fill(a.value);
  } else {
    fail(ErrorCode::kInvalidArgument, "kernel-dump: --input must be random or constant");
  }

  Tape<float> tape;
  const model::ParamVars vars = model::bind_constants(tape, net.parameters());
  model::LayerProbes probes;
  model::forward_sample(tape, cfg, vars, tape.constant_ref(patch), &probes);
  const Tensor& x = tape.value(probes.at(a.layer));

  const ops::WindowPlan plan({x.dim(0), x.dim(1), x.dim(2)}, info.window, info.stride,
                             ops::Padding::kSame);
  const ops::Dims3 od = plan.output();
  const ops::Dims3 pa = a.pos_a.empty() ? ops::Dims3{0, 0, 0} : to_dims(a.pos_a, "--pos-a");
  const ops::Dims3 pb =
      a.pos_b.empty() ? ops::Dims3{od[0] / 2, od[1] / 2, od[2] / 2} : to_dims(a.pos_b, "--pos-b");

  auto kernel_at = [&](const ops::Dims3& pos) -> Tensor {
    for (std::size_t ax = 0; ax < 3; ++ax) {
      if (pos[ax] >= od[ax]) {
        fail(ErrorCode::kAxisOutOfRange, "kernel-dump: position outside the layer output " +
                                             shape_to_string({od[0], od[1], od[2]}));
      }
    }
    const std::string& pre = info.param_prefix;
    if (info.kind == model::BlockKind::kConv) return net.parameters().get(pre + ".dw.kernel");
    ops::RelConvParams<float> p{{info.window, info.stride, ops::Padding::kSame,
                                 cfg.rc.weighting, cfg.rc.heads},
                                std::nullopt};
    if (cfg.rc.projections) {
      p.projections = ops::RelConvProjections<float>{net.parameters().get(pre + ".rc.query"),
                                                     net.parameters().get(pre + ".rc.key"),
                                                     net.parameters().get(pre + ".rc.value")};
    }
    return ops::relconv3d_dynamic_kernel(x, p, pos);
  };

  const std::size_t nw = info.window[0] * info.window[1] * info.window[2];
  const std::size_t channels = x.dim(3);
  std::ostringstream os = csv_stream();
  os << "layer,kind,position,h,w,s,channel";
  for (std::size_t w = 0; w < nw; ++w) os << ",w" << w;
  os << '\n';
  const char* kind = info.kind == model::BlockKind::kConv ? "conv" : "rc";
  for (const auto& [label, pos] : {std::pair{"a", pa}, std::pair{"b", pb}}) {
    const Tensor k = kernel_at(pos);
    for (std::size_t c = 0; c < channels; ++c) {
      os << a.layer << ',' << kind << ',' << label << ',' << pos[0] << ',' << pos[1] << ','
         << pos[2] << ',' << c;
      for (std::size_t w = 0; w < nw; ++w) os << ',' << k[w * channels + c];
      os << '\n';
    }
  }
  if (!a.common.out.empty()) write_text(fs::path(a.common.out) / "kernel_dump.csv", os.str());
  out << os.str();
  return 0;
}

void write_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relational-convolution network for hyperspectral classification", "rcnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Convert a raw dims/values/labels triplet to HSICUBE");
  add_common(s_ingest, ingest.common);
  s_ingest->add_option("--dims", ingest.dims, "Dims file: 'H W S [K]' then class names")->required();
  s_ingest->add_option("--values", ingest.values, "CSV, one row of S values per pixel")->required();
  s_ingest->add_option("--labels", ingest.labels, "CSV label grid, H rows of W")->required();
  s_ingest->add_option("--name", ingest.name, "Output file name inside --out");

  SplitArgs split;
  auto* s_split = app.add_subcommand("split", "Draw the train/test split");
  add_common(s_split, split.common);
  s_split->add_option("--data", split.data, "HSICUBE file")->required();
  s_split->add_option("--protocol", split.protocol, "uniform | indian_pines | custom");
  s_split->add_option("--per-class", split.per_class, "Training samples per class (uniform)");

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "Train a network and write checkpoints");
  add_common(s_train, tr.common);
  s_train->add_option("--data", tr.data, "HSICUBE file")->required();
  s_train->add_option("--epochs", tr.epochs);
  s_train->add_option("--batch-size", tr.batch_size);
  s_train->add_option("--lr", tr.lr, "Base learning rate");
  s_train->add_option("--warmup", tr.warmup, "Warm-up epochs");
  s_train->add_option("--threads", tr.threads);
  s_train->add_option("--patch-size", tr.patch_size);
  s_train->add_option("--preset", tr.preset, "standard | reduced");

  EvalArgs ev;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a checkpoint on the run's test split");
  add_common(s_eval, ev.common);
  s_eval->add_option("--manifest", ev.manifest, "manifest.json written by train")->required();
  s_eval->add_option("--checkpoint", ev.checkpoint, "Defaults to checkpoint_final.bin");
  s_eval->add_option("--data", ev.data, "Override the manifest's dataset");
  s_eval->add_option("--threads", ev.threads);
  s_eval->add_flag("--predictions", ev.predictions, "Also write predictions.csv");

  MacsArgs mc;
  auto* s_macs = app.add_subcommand("macs", "MAC count sweep, or per-layer costs with --config");
  add_common(s_macs, mc.common);
  s_macs->add_option("--n", mc.ns, "Position counts N = H*W*S")->delimiter(',');
  s_macs->add_option("--c", mc.cs, "Channel counts")->delimiter(',');
  s_macs->add_option("--k", mc.ks, "Window sides")->delimiter(',');
  s_macs->add_option("--bands", mc.bands);
  s_macs->add_option("--classes", mc.classes);
  s_macs->add_option("--patch-size", mc.patch);

  KernelDumpArgs kd;
  auto* s_kd = app.add_subcommand("kernel-dump", "Per-window weights of one layer at two positions");
  add_common(s_kd, kd.common);
  s_kd->add_option("--layer", kd.layer, "Layer id, e.g. stage3.block0")->required();
  s_kd->add_option("--manifest", kd.manifest, "Run manifest (network and checkpoint)");
  s_kd->add_option("--checkpoint", kd.checkpoint);
  s_kd->add_option("--data", kd.data, "HSICUBE file for --pixel");
  s_kd->add_option("--pixel", kd.pixel, "row,col of the patch centre")->delimiter(',');
  s_kd->add_option("--input", kd.input, "random | constant (without --pixel)");
  s_kd->add_option("--value", kd.value, "Fill value for --input constant");
  s_kd->add_option("--pos-a", kd.pos_a, "First output position h,w,s")->delimiter(',');
  s_kd->add_option("--pos-b", kd.pos_b, "Second output position h,w,s")->delimiter(',');
  s_kd->add_option("--bands", kd.bands);
  s_kd->add_option("--classes", kd.classes);
  s_kd->add_option("--patch-size", kd.patch);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kArtifactVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (*s_ingest) return cmd_ingest(ingest, out);
    if (*s_split) return cmd_split(split, out);
    if (*s_train) return cmd_train(tr, out, err);
    if (*s_eval) return cmd_eval(ev, out);
    if (*s_macs) return cmd_macs(mc, out);
    if (*s_kd) return cmd_kernel_dump(kd, out);
  } catch (const Error& e) {
    write_error(err, error_code_name(e.code()), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    write_error(err, "io", e.what());
    return 1;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what());
    return 1;
  }
  return 1;
}

}  // namespace rcnet::cli
