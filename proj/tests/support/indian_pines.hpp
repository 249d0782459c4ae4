#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "rcnet/data/hypercube.hpp"

namespace fixtures {

/// Labeled-pixel counts per class of the Indian Pines ground truth.
inline constexpr std::array<std::size_t, 16> kIndianPinesCounts{
    46, 1428, 830, 237, 483, 730, 28, 478, 20, 972, 2455, 593, 205, 1265, 386, 93};

/// Training counts of the standard protocol.
inline constexpr std::array<std::size_t, 16> kIndianPinesTrain{
    10, 150, 150, 10, 150, 150, 10, 150, 10, 150, 150, 150, 10, 150, 150, 10};

/// 145 x 145 scene with the Indian Pines class populations scattered at
/// seeded random positions; remaining pixels are unlabeled.
inline rcnet::data::HyperCube indian_pines_like(std::size_t bands, std::uint64_t seed) {
  rcnet::data::HyperCube cube;
  cube.height = cube.width = 145;
  cube.bands = bands;
  cube.radiance = rcnet::Tensor::random_uniform({145, 145, bands}, seed);
  std::vector<std::size_t> order(145 * 145);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
  cube.labels.assign(145 * 145, 0);
  std::size_t next = 0;
  for (std::size_t k = 0; k < 16; ++k) {
    for (std::size_t i = 0; i < kIndianPinesCounts[k]; ++i) {
      cube.labels[order[next++]] = static_cast<int>(k + 1);
    }
    cube.class_names.push_back("class_" + std::to_string(k + 1));
  }
  return cube;
}

}  // namespace fixtures
