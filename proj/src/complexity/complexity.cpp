#include "rcnet/complexity.hpp"

#include "rcnet/error.hpp"

namespace rcnet::complexity {

namespace {

void check(const OpDims& d) {
  if (d.h < 1 || d.w < 1 || d.s < 1 || d.c < 1 || d.k < 1) {
    fail(ErrorCode::kInvalidArgument, "complexity: all dimensions must be >= 1");
  }
}

MacCount positions(const OpDims& d) { return MacCount(d.h) * d.w * d.s; }

MacCount window_volume(const OpDims& d) { return MacCount(d.k) * d.k * d.k; }

}  // namespace

MacCount macs_conv(const OpDims& d) {
  check(d);
  return positions(d) * window_volume(d) * d.c;
}

MacCount macs_selfattn(const OpDims& d) {
  check(d);
  const MacCount n = positions(d);
  return 2 * n * n * d.c;
}

MacCount macs_rcblock(const OpDims& d) {
  check(d);
  return 2 * positions(d) * window_volume(d) * d.c;
}

MacCount crossover_resolution(std::uint64_t channels, std::uint64_t k) {
  if (channels < 1 || k < 1) {
    fail(ErrorCode::kInvalidArgument, "crossover_resolution: C and k must be >= 1");
  }
  return MacCount(k) * k * k + 1;
}

void write_macs_sweep(std::ostream& os, std::span<const std::uint64_t> ns,
                      std::span<const std::uint64_t> cs, std::span<const std::uint64_t> ks) {
  os << "N,C,k,conv,selfattn,rcblock\n";
  for (auto n : ns) {
    for (auto c : cs) {
      for (auto k : ks) {
        const OpDims d{n, 1, 1, c, k};
        os << n << ',' << c << ',' << k << ',' << macs_conv(d) << ',' << macs_selfattn(d)
           << ',' << macs_rcblock(d) << '\n';
      }
    }
  }
}

}  // namespace rcnet::complexity
