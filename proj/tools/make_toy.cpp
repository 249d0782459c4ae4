// Writes the block-structured toy scene as an HSICUBE file.
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcnet/data/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a separable toy hyperspectral scene", "rcnet_toy"};
  rcnet::data::ToySceneSpec spec;
  std::string out = "toy.hsicube";
  app.add_option("--out", out, "Output HSICUBE path");
  app.add_option("--seed", spec.seed);
  app.add_option("--classes", spec.classes);
  app.add_option("--bands", spec.bands);
  app.add_option("--block", spec.block, "Region side in pixels");
  app.add_option("--labeled", spec.labeled, "Labeled square side per region");
  app.add_option("--separation", spec.separation, "Mean offset in units of the noise std");
  CLI11_PARSE(app, argc, argv);
  try {
    rcnet::data::save_hypercube(out, rcnet::data::make_toy_scene(spec));
  } catch (const rcnet::Error& e) {
    std::cerr << nlohmann::json{{"error", rcnet::error_code_name(e.code())}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  std::cout << nlohmann::json{{"path", out}}.dump() << "\n";
  return 0;
}
