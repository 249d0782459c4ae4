#pragma once

#include <cstddef>
#include <cstdint>

#include "rcnet/data/hypercube.hpp"

namespace rcnet::data {

/// Block-structured toy scene: `classes` square regions of side `block` laid
/// side by side. Only the central `labeled` x `labeled` pixels of each region
/// carry a label, so every patch of side <= block - labeled + 1 around a
/// labeled pixel stays inside its region. Pixel spectra are the class mean
/// plus N(0, noise^2); class c's mean is `separation * noise` on bands
/// b with b % (c + 1) == 0 and 0 elsewhere. Classes differ in the period of
/// the pattern, not its phase, so a spectrally shift-invariant model can
/// tell them apart.
struct ToySceneSpec {
  std::size_t classes = 3;
  std::size_t bands = 16;
  std::size_t block = 18;
  std::size_t labeled = 10;
  double separation = 3.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

HyperCube make_toy_scene(const ToySceneSpec& spec);

}  // namespace rcnet::data
