#include "rcnet/data/hypercube.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rcnet/detail/binary_io.hpp"

namespace rcnet::data {

void HyperCube::validate() const {
  require(height >= 1 && width >= 1 && bands >= 1, ErrorCode::kFormat,
          "hypercube: dimensions must be positive");
  require(radiance.shape() == Shape{height, width, bands}, ErrorCode::kFormat,
          "hypercube: radiance shape " + shape_to_string(radiance.shape()) +
              " does not match header");
  require(labels.size() == height * width, ErrorCode::kFormat,
          "hypercube: label grid size does not match H*W");
  const int k = static_cast<int>(num_classes());
  for (int label : labels) {
    if (label < 0 || label > k) {
      fail(ErrorCode::kFormat, "hypercube: label " + std::to_string(label) +
                                   " outside 0.." + std::to_string(k));
    }
  }
}

std::vector<std::size_t> HyperCube::class_counts() const {
  std::vector<std::size_t> counts(num_classes() + 1, 0);
  for (int label : labels) {
    if (label > 0) ++counts[static_cast<std::size_t>(label)];
  }
  return counts;
}

namespace {

std::vector<std::string> default_class_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("class_" + std::to_string(i));
  return names;
}

}  // namespace

HyperCube load_hypercube(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::kFormat, "hsicube: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("hsicube: malformed header: ") + e.what());
  }
  HyperCube cube;
  try {
    const long h = header.at("h").get<long>();
    const long w = header.at("w").get<long>();
    const long s = header.at("s").get<long>();
    const long k = header.at("k").get<long>();
    if (h < 1 || w < 1 || s < 1 || k < 0) {
      fail(ErrorCode::kFormat, "hsicube: non-positive dimension in header");
    }
    cube.height = static_cast<std::size_t>(h);
    cube.width = static_cast<std::size_t>(w);
    cube.bands = static_cast<std::size_t>(s);
    cube.class_names = header.value("class_names", std::vector<std::string>{});
    if (cube.class_names.empty()) cube.class_names = default_class_names(static_cast<std::size_t>(k));
    if (cube.class_names.size() != static_cast<std::size_t>(k)) {
      fail(ErrorCode::kFormat, "hsicube: class_names length differs from k");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("hsicube: bad header field: ") + e.what());
  }
  const std::size_t pixels = cube.height * cube.width;
  cube.radiance = Tensor({cube.height, cube.width, cube.bands},
                         detail::read_f32_le(is, pixels * cube.bands, "hsicube radiance"));
  const auto raw_labels = detail::read_i16_le(is, pixels, "hsicube labels");
  cube.labels.assign(raw_labels.begin(), raw_labels.end());
  if (is.peek() != std::char_traits<char>::eof()) {
    fail(ErrorCode::kFormat, "hsicube: payload longer than header declares");
  }
  cube.validate();
  return cube;
}

void save_hypercube(const std::filesystem::path& path, const HyperCube& cube) {
  cube.validate();
  nlohmann::json header = {{"h", cube.height},
                           {"w", cube.width},
                           {"s", cube.bands},
                           {"k", cube.num_classes()},
                           {"class_names", cube.class_names}};
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path.string());
  os << header.dump() << '\n';
  detail::write_f32_le(os, cube.radiance.data());
  std::vector<std::int16_t> labels(cube.labels.begin(), cube.labels.end());
  detail::write_i16_le(os, labels);
  if (!os) fail(ErrorCode::kIo, "failed writing " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

template <typename Num>
Num parse_number(const std::string& text, const std::filesystem::path& where) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  Num v{};
  is >> v;
  if (!is || !(is >> std::ws).eof()) {
    fail(ErrorCode::kFormat, where.string() + ": cannot parse '" + text + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

}  // namespace

HyperCube ingest_triplet(const std::filesystem::path& dims_path,
                         const std::filesystem::path& values_csv,
                         const std::filesystem::path& labels_csv) {
  std::ifstream dims(dims_path);
  if (!dims) fail(ErrorCode::kIo, "cannot open " + dims_path.string());
  std::string first;
  while (std::getline(dims, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  std::istringstream head(first);
  long h = 0, w = 0, s = 0, k = -1;
  head >> h >> w >> s;
  if (!head || h < 1 || w < 1 || s < 1) {
    fail(ErrorCode::kFormat, dims_path.string() + ": expected 'H W S [K]' on the first line");
  }
  if (!(head >> k)) k = -1;
  std::vector<std::string> names;
  std::string line;
  while (std::getline(dims, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }

  HyperCube cube;
  cube.height = static_cast<std::size_t>(h);
  cube.width = static_cast<std::size_t>(w);
  cube.bands = static_cast<std::size_t>(s);

  const auto value_rows = read_csv(values_csv);
  if (value_rows.size() != cube.height * cube.width) {
    fail(ErrorCode::kFormat, values_csv.string() + ": expected " +
                                 std::to_string(cube.height * cube.width) +
                                 " pixel rows, found " + std::to_string(value_rows.size()));
  }
  std::vector<float> values;
  values.reserve(cube.height * cube.width * cube.bands);
  for (const auto& row : value_rows) {
    if (row.size() != cube.bands) {
      fail(ErrorCode::kFormat, values_csv.string() + ": pixel row with " +
                                   std::to_string(row.size()) + " values, expected " +
                                   std::to_string(cube.bands));
    }
    for (const auto& field : row) values.push_back(parse_number<float>(field, values_csv));
  }
  cube.radiance = Tensor({cube.height, cube.width, cube.bands}, std::move(values));

  const auto label_rows = read_csv(labels_csv);
  if (label_rows.size() != cube.height) {
    fail(ErrorCode::kFormat, labels_csv.string() + ": expected " +
                                 std::to_string(cube.height) + " label rows, found " +
                                 std::to_string(label_rows.size()));
  }
  int max_label = 0;
  for (const auto& row : label_rows) {
    if (row.size() != cube.width) {
      fail(ErrorCode::kFormat, labels_csv.string() + ": label row with " +
                                   std::to_string(row.size()) + " columns, expected " +
                                   std::to_string(cube.width));
    }
    for (const auto& field : row) {
      const int label = parse_number<int>(field, labels_csv);
      cube.labels.push_back(label);
      max_label = std::max(max_label, label);
    }
  }

  std::size_t classes = 0;
  if (!names.empty()) {
    classes = names.size();
    if (k >= 0 && static_cast<std::size_t>(k) != classes) {
      fail(ErrorCode::kFormat, dims_path.string() + ": K disagrees with class name count");
    }
  } else {
    classes = k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(max_label);
  }
  cube.class_names = names.empty() ? default_class_names(classes) : names;
  cube.validate();
  return cube;
}

HyperCube standardize_bands(const HyperCube& cube) {
  HyperCube out = cube;
  const std::size_t pixels = cube.height * cube.width;
  const std::size_t s = cube.bands;
  std::vector<double> mean(s, 0.0), var(s, 0.0);
  std::size_t labeled = 0;
  for (std::size_t p = 0; p < pixels; ++p) {
    if (cube.labels[p] == 0) continue;
    ++labeled;
    for (std::size_t b = 0; b < s; ++b) mean[b] += cube.radiance[p * s + b];
  }
  if (labeled > 0) {
    for (double& m : mean) m /= static_cast<double>(labeled);
    for (std::size_t p = 0; p < pixels; ++p) {
      if (cube.labels[p] == 0) continue;
      for (std::size_t b = 0; b < s; ++b) {
        const double d = cube.radiance[p * s + b] - mean[b];
        var[b] += d * d;
      }
    }
  }
  for (std::size_t b = 0; b < s; ++b) {
    const double sd = labeled > 0 ? std::sqrt(var[b] / static_cast<double>(labeled)) : 0.0;
    for (std::size_t p = 0; p < pixels; ++p) {
      float& v = out.radiance[p * s + b];
      v = sd > 0.0 ? static_cast<float>((cube.radiance[p * s + b] - mean[b]) / sd) : 0.0f;
    }
  }
  return out;
}

}  // namespace rcnet::data
