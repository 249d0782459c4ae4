#include "rcnet/checkpoint.hpp"

#include <fstream>
#include <json.hpp>

#include "rcnet/detail/binary_io.hpp"

namespace rcnet {

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  nlohmann::json header = nlohmann::json::array();
  for (const auto& t : tensors) header.push_back({{"name", t.name}, {"shape", t.value.shape()}});
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot write checkpoint " + path.string());
  os << header.dump() << '\n';
  for (const auto& t : tensors) detail::write_f32_le(os, t.value.data());
  if (!os) fail(ErrorCode::kIo, "failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::kFormat, "checkpoint: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("checkpoint: malformed header: ") + e.what());
  }
  if (!header.is_array()) fail(ErrorCode::kFormat, "checkpoint: header must be an array");
  std::vector<NamedTensor> out;
  for (const auto& entry : header) {
    if (!entry.contains("name") || !entry.contains("shape")) {
      fail(ErrorCode::kFormat, "checkpoint: header entry needs name and shape");
    }
    Shape shape = entry.at("shape").get<Shape>();
    validate_shape(shape);
    std::vector<float> values = detail::read_f32_le(is, shape_size(shape), "checkpoint");
    out.push_back({entry.at("name").get<std::string>(), Tensor(shape, std::move(values))});
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    fail(ErrorCode::kFormat, "checkpoint: trailing bytes after declared tensors");
  }
  return out;
}

}  // namespace rcnet
