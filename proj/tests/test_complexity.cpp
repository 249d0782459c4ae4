#include <doctest.h>

#include <sstream>

#include "rcnet/complexity.hpp"

using namespace rcnet::complexity;

TEST_CASE("macs_conv") {
  CHECK(macs_conv({1, 1, 1, 1, 1}) == 1);
  CHECK(macs_conv({27, 27, 200, 16, 3}) == 62985600);
  CHECK(macs_conv({8, 8, 8, 4, 3}) == 55296);
  CHECK(macs_conv({5, 6, 7, 32, 3}) * 2 == macs_conv({5, 6, 7, 64, 3}));
}

TEST_CASE("macs_selfattn") {
  CHECK(macs_selfattn({1, 1, 1, 1}) == 2);
  CHECK(macs_selfattn({4, 4, 2, 1}) == 2048);
  CHECK(macs_selfattn({8, 4, 2, 3}) == 16 * macs_selfattn({2, 4, 2, 3}));
}

TEST_CASE("macs_rcblock") {
  CHECK(macs_rcblock({1, 1, 1, 1, 1}) == 2);
  CHECK(macs_rcblock({27, 27, 200, 16, 3}) == 125971200);
  CHECK(macs_rcblock({8, 8, 8, 4, 3}) == 110592);
  for (std::uint64_t n = 1; n < 6; ++n)
    for (std::uint64_t k : {1, 3, 5}) CHECK(macs_rcblock({n, n + 1, 2 * n, 7, k}) == 2 * macs_conv({n, n + 1, 2 * n, 7, k}));
}

TEST_CASE("crossover resolution") {
  CHECK(crossover_resolution(16, 3) == 28);
  CHECK(crossover_resolution(1, 1) == 2);
  CHECK(crossover_resolution(1, 3) == crossover_resolution(512, 3));
  // At the crossover self-attention first exceeds the relational block.
  CHECK(macs_selfattn({28, 1, 1, 5}) > macs_rcblock({28, 1, 1, 5, 3}));
  CHECK(macs_selfattn({27, 1, 1, 5}) == macs_rcblock({27, 1, 1, 5, 3}));
}

TEST_CASE("no overflow for large dimensions") {
  const MacCount big = macs_selfattn({1u << 20, 1u << 20, 1u << 10, 1u << 12});
  MacCount want = 1;
  want <<= 1 + 2 * 50 + 12;
  CHECK(big == want);
}

TEST_CASE("sweep csv") {
  std::ostringstream os;
  const std::vector<std::uint64_t> ns{4}, cs{2}, ks{3};
  write_macs_sweep(os, ns, cs, ks);
  CHECK(os.str() == "N,C,k,conv,selfattn,rcblock\n4,2,3,216,64,432\n");
}
