#include "rcnet/ops/window.hpp"

#include <string>

#include "rcnet/error.hpp"

namespace rcnet::ops {

std::size_t reflect_index(long index, std::size_t extent) {
  if (extent == 1) return 0;
  const long period = 2 * (static_cast<long>(extent) - 1);
  long i = index % period;
  if (i < 0) i += period;
  if (i >= static_cast<long>(extent)) i = period - i;
  return static_cast<std::size_t>(i);
}

WindowPlan::WindowPlan(Dims3 input, Dims3 window, Dims3 stride, Padding padding)
    : input_(input), window_(window), stride_(stride), padding_(padding) {
  for (std::size_t a = 0; a < 3; ++a) {
    require(input[a] >= 1 && window[a] >= 1, ErrorCode::kInvalidShape,
            "window plan: extents must be positive");
    require(stride[a] >= 1, ErrorCode::kInvalidArgument, "window plan: stride must be >= 1");
    long pad_before = 0;
    if (padding == Padding::kSame) {
      output_[a] = (input[a] + stride[a] - 1) / stride[a];
      const long total = static_cast<long>((output_[a] - 1) * stride[a] + window[a]) -
                         static_cast<long>(input[a]);
      pad_before = total > 0 ? total / 2 : 0;
    } else {
      if (window[a] > input[a]) {
        fail(ErrorCode::kInvalidShape, "window " + std::to_string(window[a]) +
                                           " larger than input extent " +
                                           std::to_string(input[a]) + " in valid mode");
      }
      output_[a] = (input[a] - window[a]) / stride[a] + 1;
    }
    auto& table = sources_[a];
    table.resize(output_[a] * window[a]);
    for (std::size_t o = 0; o < output_[a]; ++o) {
      for (std::size_t m = 0; m < window[a]; ++m) {
        const long raw = static_cast<long>(o * stride[a] + m) - pad_before;
        table[o * window[a] + m] = reflect_index(raw, input[a]);
      }
    }
  }
}

std::size_t WindowPlan::source_position(std::size_t o, std::size_t w) const {
  const std::size_t os = o % output_[2];
  const std::size_t ow = (o / output_[2]) % output_[1];
  const std::size_t oh = o / (output_[2] * output_[1]);
  const std::size_t ms = w % window_[2];
  const std::size_t mw = (w / window_[2]) % window_[1];
  const std::size_t mh = w / (window_[2] * window_[1]);
  return (source(0, oh, mh) * input_[1] + source(1, ow, mw)) * input_[2] + source(2, os, ms);
}

std::size_t WindowPlan::center_position(std::size_t o) const {
  const std::size_t os = o % output_[2];
  const std::size_t ow = (o / output_[2]) % output_[1];
  const std::size_t oh = o / (output_[2] * output_[1]);
  return (center(0, oh) * input_[1] + center(1, ow)) * input_[2] + center(2, os);
}

std::vector<std::size_t> WindowPlan::gather_table() const {
  const std::size_t nw = window_size();
  std::vector<std::size_t> table(output_positions() * nw);
  std::size_t o = 0;
  for (std::size_t oh = 0; oh < output_[0]; ++oh) {
    for (std::size_t ow = 0; ow < output_[1]; ++ow) {
      for (std::size_t os = 0; os < output_[2]; ++os, ++o) {
        std::size_t w = 0;
        for (std::size_t mh = 0; mh < window_[0]; ++mh) {
          const std::size_t row = source(0, oh, mh) * input_[1];
          for (std::size_t mw = 0; mw < window_[1]; ++mw) {
            const std::size_t col = (row + source(1, ow, mw)) * input_[2];
            for (std::size_t ms = 0; ms < window_[2]; ++ms, ++w) {
              table[o * nw + w] = col + source(2, os, ms);
            }
          }
        }
      }
    }
  }
  return table;
}

std::vector<std::size_t> WindowPlan::center_table() const {
  std::vector<std::size_t> table(output_positions());
  for (std::size_t o = 0; o < table.size(); ++o) table[o] = center_position(o);
  return table;
}

}  // namespace rcnet::ops
