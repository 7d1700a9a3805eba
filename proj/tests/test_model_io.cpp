// Copyright 2026 CTCSpot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "model_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <unistd.h>
#include <fstream>

#include "common.hpp"

using namespace ctcspot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() /
           ("ctcspot_model_" + std::to_string(::getpid()) + "_" +
            std::to_string(n++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

Model make_model(std::uint64_t seed) {
  Model model;
  model.config.input_dim = 7;
  model.config.layer_sizes = {128, 128, 128};
  model.config.output_dim = 30;
  Rng rng(seed);
  model.params = net::NetworkParams::init(model.config, rng);
  model.stats.mean = Eigen::VectorXd::NullaryExpr(7, [&] { return rng.normal(); });
  model.stats.std = Eigen::VectorXd::Constant(7, 1.25);
  return model;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("save -> load -> save produces identical bytes") {
  TempDir tmp;
  Model model = make_model(7);
  const std::string first = tmp.file("a.ctcspot");
  const std::string second = tmp.file("b.ctcspot");
  save_model(model, first);
  Model loaded = load_model(first);
  save_model(loaded, second);
  CHECK(slurp(first) == slurp(second));

  CHECK(loaded.config.layer_sizes == std::vector<int>{128, 128, 128});
  CHECK(loaded.config.input_dim == 7);
  CHECK(loaded.alphabet == model.alphabet);
  CHECK(loaded.stats.std[0] == doctest::Approx(1.25));
}

TEST_CASE("corrupted magic is a format error") {
  TempDir tmp;
  Model model = make_model(9);
  const std::string path = tmp.file("m.ctcspot");
  save_model(model, path);
  std::string bytes = slurp(path);
  bytes[3] = 'X';
  std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
  CHECK_THROWS_AS(load_model(path), DataError);
}

TEST_CASE("truncated files are rejected") {
  TempDir tmp;
  Model model = make_model(11);
  const std::string path = tmp.file("m.ctcspot");
  save_model(model, path);
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 5);
  CHECK_THROWS_AS(load_model(path), DataError);
  fs::resize_file(path, 10);
  CHECK_THROWS_AS(load_model(path), DataError);
}

TEST_CASE("tensor shape mismatch is detected") {
  TempDir tmp;
  Model model = make_model(13);
  const std::string path = tmp.file("m.ctcspot");
  save_model(model, path);
  std::string bytes = slurp(path);
  const std::string name = "layer0.w_ix";
  const auto pos = bytes.find(name);
  REQUIRE(pos != std::string::npos);
  // the four bytes after the name hold the row count (little-endian)
  bytes[pos + name.size()] = static_cast<char>(
      static_cast<unsigned char>(bytes[pos + name.size()]) + 1);
  std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
  CHECK_THROWS_AS(load_model(path), DataError);
}

TEST_CASE("missing model file is a data error") {
  CHECK_THROWS_AS(load_model("/nonexistent/path/model.ctcspot"), DataError);
}
