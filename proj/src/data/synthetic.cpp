#include "rcnet/data/synthetic.hpp"

#include <random>
#include <string>

namespace rcnet::data {

HyperCube make_toy_scene(const ToySceneSpec& spec) {
  require(spec.classes >= 1 && spec.bands >= 1, ErrorCode::kInvalidArgument,
          "toy scene: classes and bands must be >= 1");
  require(spec.labeled >= 1 && spec.labeled <= spec.block, ErrorCode::kInvalidArgument,
          "toy scene: labeled side must be in [1, block]");
  HyperCube cube;
  cube.height = spec.block;
  cube.width = spec.block * spec.classes;
  cube.bands = spec.bands;
  cube.radiance = Tensor({cube.height, cube.width, cube.bands});
  cube.labels.assign(cube.height * cube.width, 0);
  for (std::size_t c = 1; c <= spec.classes; ++c) cube.class_names.push_back("class_" + std::to_string(c));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, spec.noise);
  const std::size_t margin = (spec.block - spec.labeled) / 2;
  for (std::size_t r = 0; r < cube.height; ++r) {
    for (std::size_t col = 0; col < cube.width; ++col) {
      const std::size_t cls = col / spec.block;
      const std::size_t local = col % spec.block;
      for (std::size_t b = 0; b < spec.bands; ++b) {
        const double mean = b % (cls + 2) == 0 ? spec.separation * spec.noise : 0.0;
        cube.radiance[(r * cube.width + col) * spec.bands + b] =
            static_cast<float>(mean + gauss(rng));
      }
      const bool inside = r >= margin && r < margin + spec.labeled && local >= margin &&
                          local < margin + spec.labeled;
      if (inside) cube.labels[r * cube.width + col] = static_cast<int>(cls + 1);
    }
  }
  return cube;
}

}  // namespace rcnet::data
