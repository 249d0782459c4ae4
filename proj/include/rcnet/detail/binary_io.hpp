#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "rcnet/error.hpp"

namespace rcnet::detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename Int>
Int byteswap_if_big(Int v) {
  if constexpr (std::endian::native == std::endian::big) {
    Int out{};
    auto* src = reinterpret_cast<const unsigned char*>(&v);
    auto* dst = reinterpret_cast<unsigned char*>(&out);
    for (std::size_t i = 0; i < sizeof(Int); ++i) dst[i] = src[sizeof(Int) - 1 - i];
    return out;
  } else {
    return v;
  }
}

inline void write_f32_le(std::ostream& os, std::span<const float> values) {
  std::vector<std::uint32_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    raw[i] = byteswap_if_big(std::bit_cast<std::uint32_t>(values[i]));
  }
  os.write(reinterpret_cast<const char*>(raw.data()),
           static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
}

inline void write_i16_le(std::ostream& os, std::span<const std::int16_t> values) {
  std::vector<std::int16_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) raw[i] = byteswap_if_big(values[i]);
  os.write(reinterpret_cast<const char*>(raw.data()),
           static_cast<std::streamsize>(raw.size() * sizeof(std::int16_t)));
}

/// Reads exactly `count` floats or throws kFormat.
inline std::vector<float> read_f32_le(std::istream& is, std::size_t count, const char* what) {
  std::vector<std::uint32_t> raw(count);
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(std::uint32_t)) {
    fail(ErrorCode::kFormat, std::string(what) + ": payload shorter than header declares");
  }
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(byteswap_if_big(raw[i]));
  return out;
}

inline std::vector<std::int16_t> read_i16_le(std::istream& is, std::size_t count,
                                             const char* what) {
  std::vector<std::int16_t> out(count);
  is.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(count * sizeof(std::int16_t)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(std::int16_t)) {
    fail(ErrorCode::kFormat, std::string(what) + ": payload shorter than header declares");
  }
  for (auto& v : out) v = byteswap_if_big(v);
  return out;
}

}  // namespace rcnet::detail
