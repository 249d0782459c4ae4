#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "rcnet/data/sampling.hpp"
#include "rcnet/data/synthetic.hpp"
#include "support/indian_pines.hpp"
#include "support/oracles.hpp"

using namespace rcnet;
using namespace rcnet::data;
namespace fs = std::filesystem;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an rcnet::Error");
  return ErrorCode::kIo;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

HyperCube small_cube(std::size_t h, std::size_t w, std::size_t s, int k, std::uint64_t seed) {
  HyperCube c;
  c.height = h;
  c.width = w;
  c.bands = s;
  c.radiance = Tensor::random_uniform({h, w, s}, seed);
  for (std::size_t i = 0; i < h * w; ++i) c.labels.push_back(static_cast<int>(i % (k + 1)));
  for (int i = 1; i <= k; ++i) c.class_names.push_back("c" + std::to_string(i));
  return c;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("hsicube round trip and validation") {
  TempDir dir("rcnet_hsi_test");
  const HyperCube cube = small_cube(4, 4, 3, 2, 1);
  const fs::path file = dir.path / "toy.hsicube";
  save_hypercube(file, cube);
  const HyperCube back = load_hypercube(file);
  CHECK(back.height == 4);
  CHECK(back.width == 4);
  CHECK(back.bands == 3);
  CHECK(back.num_classes() == 2);
  CHECK(back.radiance.storage() == cube.radiance.storage());
  CHECK(back.labels == cube.labels);
  CHECK(back.class_names == cube.class_names);

  // Header line then 48 floats and 16 int16 labels.
  std::ifstream in(file, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(fs::file_size(file) == header.size() + 1 + 48 * 4 + 16 * 2);
  in.close();

  fs::resize_file(file, fs::file_size(file) - 3);
  CHECK(code_of([&] { load_hypercube(file); }) == ErrorCode::kFormat);

  HyperCube bad = cube;
  bad.labels[5] = 3;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::kFormat);
  save_hypercube(file, cube);
  {
    // Corrupt one label in place to exceed K.
    std::fstream io(file, std::ios::binary | std::ios::in | std::ios::out);
    io.seekp(static_cast<std::streamoff>(header.size() + 1 + 48 * 4));
    const char bytes[2] = {7, 0};
    io.write(bytes, 2);
  }
  CHECK(code_of([&] { load_hypercube(file); }) == ErrorCode::kFormat);
  write(dir.path / "junk.hsicube", "not json\n");
  CHECK(code_of([&] { load_hypercube(dir.path / "junk.hsicube"); }) == ErrorCode::kFormat);
  CHECK(code_of([&] { load_hypercube(dir.path / "missing.hsicube"); }) == ErrorCode::kIo);
}

TEST_CASE("ingest triplet") {
  TempDir dir("rcnet_ingest_test");
  write(dir.path / "dims.txt", "2 2 3\ngrass\nroad\n");
  write(dir.path / "values.csv", "1,2,3\n4,5,6\n7,8,9\n10,11,12\n");
  write(dir.path / "labels.csv", "0,1\n2,1\n");
  const HyperCube cube =
      ingest_triplet(dir.path / "dims.txt", dir.path / "values.csv", dir.path / "labels.csv");
  CHECK(cube.height == 2);
  CHECK(cube.bands == 3);
  CHECK(cube.class_names == std::vector<std::string>{"grass", "road"});
  CHECK(cube.spectrum(1, 0)[2] == 9.0f);
  CHECK(cube.label(1, 0) == 2);

  write(dir.path / "bad_labels.csv", "0,1,1\n2,1,1\n");
  CHECK(code_of([&] {
          ingest_triplet(dir.path / "dims.txt", dir.path / "values.csv", dir.path / "bad_labels.csv");
        }) == ErrorCode::kFormat);
  write(dir.path / "short.csv", "1,2,3\n4,5,6\n");
  CHECK(code_of([&] {
          ingest_triplet(dir.path / "dims.txt", dir.path / "short.csv", dir.path / "labels.csv");
        }) == ErrorCode::kFormat);
}

TEST_CASE("standardize_bands") {
  HyperCube c;
  c.height = 1;
  c.width = 3;
  c.bands = 2;
  c.radiance = Tensor({1, 3, 2}, {5, 1, 5, 3, 5, 100});
  c.labels = {1, 1, 0};
  c.class_names = {"a"};
  const HyperCube s = standardize_bands(c);
  CHECK(s.radiance[0] == 0.0f);
  CHECK(s.radiance[2] == 0.0f);
  CHECK(s.radiance[4] == 0.0f);
  CHECK(s.radiance[1] == doctest::Approx(-1.0));
  CHECK(s.radiance[3] == doctest::Approx(1.0));

  const HyperCube r = standardize_bands(small_cube(9, 7, 4, 3, 5));
  for (std::size_t b = 0; b < 4; ++b) {
    double sum = 0, sq = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < 63; ++i) {
      if (r.labels[i] == 0) continue;
      sum += r.radiance[i * 4 + b];
      ++n;
    }
    const double mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < 63; ++i) {
      if (r.labels[i] != 0) sq += std::pow(r.radiance[i * 4 + b] - mean, 2);
    }
    CHECK(std::fabs(mean) < 1e-5);
    CHECK(std::fabs(std::sqrt(sq / static_cast<double>(n)) - 1.0) < 1e-4);
  }
}

TEST_CASE("extract_patch") {
  HyperCube c = small_cube(4, 4, 3, 1, 2);
  std::fill(c.labels.begin(), c.labels.end(), 1);
  const PatchSample one = extract_patch(c, 2, 1, 1);
  CHECK(one.cube.shape() == Shape{1, 1, 3});
  for (std::size_t b = 0; b < 3; ++b) CHECK(one.cube[b] == c.spectrum(2, 1)[b]);

  const PatchSample corner = extract_patch(c, 0, 0, 3);
  for (std::size_t b = 0; b < 3; ++b) CHECK(corner.cube.at({0, 0, b}) == c.spectrum(1, 1)[b]);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t b = 0; b < 3; ++b) {
        const std::size_t r = oracle::mirror(static_cast<long>(i) - 1, 4);
        const std::size_t q = oracle::mirror(static_cast<long>(j) - 1, 4);
        CHECK(corner.cube.at({i, j, b}) == c.spectrum(r, q)[b]);
      }
  CHECK(corner.label == 1);
  CHECK(corner.center == PixelIndex{0, 0});

  CHECK(code_of([&] { extract_patch(c, 1, 1, 4); }) == ErrorCode::kInvalidArgument);
  c.labels[5] = 0;
  CHECK(code_of([&] { extract_patch(c, 1, 1, 3); }) == ErrorCode::kInvalidArgument);

  const HyperCube big = fixtures::indian_pines_like(5, 3);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < big.labels.size() && checked < 5; ++i) {
    const std::size_t r = i / 145, q = i % 145;
    if (big.labels[i] == 0 || r < 13 || q < 13 || r > 131 || q > 131) continue;
    const PatchSample p = extract_patch(big, r, q, 27);
    CHECK(p.cube.shape() == Shape{27, 27, 5});
    CHECK(p.cube.at({0, 0, 4}) == big.spectrum(r - 13, q - 13)[4]);
    CHECK(p.cube.at({26, 26, 0}) == big.spectrum(r + 13, q + 13)[0]);
    CHECK(p.label == big.labels[i]);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("extract_patch commutes with translation on interior pixels") {
  const HyperCube a = small_cube(12, 12, 2, 2, 9);
  HyperCube b = a;
  const std::size_t dr = 2, dc = 1;
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t q = 0; q < 12; ++q) {
      const std::size_t sr = (r + 12 - dr) % 12, sq = (q + 12 - dc) % 12;
      b.labels[r * 12 + q] = a.labels[sr * 12 + sq];
      for (std::size_t s = 0; s < 2; ++s) b.radiance[(r * 12 + q) * 2 + s] = a.radiance[(sr * 12 + sq) * 2 + s];
    }
  for (std::size_t r = 2; r + 2 + dr < 12; ++r)
    for (std::size_t q = 2; q + 2 + dc < 12; ++q) {
      if (a.label(r, q) == 0) continue;
      CHECK(extract_patch(a, r, q, 5).cube.storage() ==
            extract_patch(b, r + dr, q + dc, 5).cube.storage());
    }
}

TEST_CASE("split_train_test") {
  HyperCube c = small_cube(3, 3, 1, 2, 1);
  c.labels = {1, 1, 1, 1, 1, 2, 2, 0, 0};
  SplitSpec spec{{{1, 2}, {2, 1}}, 4};
  const Split s = split_train_test(c, spec);
  CHECK(s.train.size() == 3);
  CHECK(s.test.size() == 4);
  std::set<PixelIndex> all(s.train.begin(), s.train.end());
  for (const auto& p : s.test) CHECK(all.insert(p).second);
  CHECK(all.size() == 7);
  std::size_t ones = 0;
  for (const auto& p : s.train) ones += c.label(p.row, p.col) == 1;
  CHECK(ones == 2);

  const Split again = split_train_test(c, spec);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  spec.per_class_train[2] = 3;
  CHECK(code_of([&] { split_train_test(c, spec); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("Indian Pines protocol gives 1560 training pixels") {
  const HyperCube cube = fixtures::indian_pines_like(2, 11);
  const Split s = split_train_test(cube, SplitSpec::indian_pines(0));
  CHECK(s.train.size() == 1560);
  CHECK(s.train.size() + s.test.size() == 10249);
  std::vector<std::size_t> per(17, 0);
  for (const auto& p : s.train) ++per[static_cast<std::size_t>(cube.label(p.row, p.col))];
  for (std::size_t k = 0; k < 16; ++k) CHECK(per[k + 1] == fixtures::kIndianPinesTrain[k]);
}

TEST_CASE("toy scene") {
  const HyperCube t = make_toy_scene({});
  CHECK(t.height == 18);
  CHECK(t.width == 54);
  const auto counts = t.class_counts();
  CHECK(counts[1] == 100);
  CHECK(counts[2] == 100);
  CHECK(counts[3] == 100);
  // Every 9x9 patch around a labeled pixel stays inside its own region.
  for (std::size_t r = 0; r < 18; ++r)
    for (std::size_t q = 0; q < 54; ++q) {
      if (t.label(r, q) == 0) continue;
      CHECK(r >= 4);
      CHECK(r + 4 < 18);
      CHECK((q % 18) >= 4);
      CHECK((q % 18) + 4 < 18);
    }
}
