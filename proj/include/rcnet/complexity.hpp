#pragma once

#include <cstdint>
#include <ostream>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

namespace rcnet::complexity {

/// Exact multiply-accumulate count; never overflows.
using MacCount = boost::multiprecision::cpp_int;

/// Feature-map extents and window size of one aggregation layer.
struct OpDims {
  std::uint64_t h = 1;
  std::uint64_t w = 1;
  std::uint64_t s = 1;
  std::uint64_t c = 1;
  std::uint64_t k = 3;
};

/// H*W*S*k^3*C: depthwise 3D convolution.
MacCount macs_conv(const OpDims& d);

/// 2*(H*W*S)^2*C: global self-attention over all positions.
MacCount macs_selfattn(const OpDims& d);

/// 2*(H*W*S)*k^3*C: relational convolution, always twice macs_conv.
MacCount macs_rcblock(const OpDims& d);

/// Smallest N = H*W*S at which self-attention costs more than the relational
/// block: N > k^3, independent of C.
MacCount crossover_resolution(std::uint64_t channels, std::uint64_t k);

/// CSV sweep with header N,C,k,conv,selfattn,rcblock, where N = H*W*S.
void write_macs_sweep(std::ostream& os, std::span<const std::uint64_t> ns,
                      std::span<const std::uint64_t> cs, std::span<const std::uint64_t> ks);

}  // namespace rcnet::complexity
