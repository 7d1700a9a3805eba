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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>

#include "common.hpp"
#include "stream_file.hpp"
#include "wav.hpp"

using namespace ctcspot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ctcspot_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
  static int counter() {
    static int n = 0;
    return n++;
  }
};

}  // namespace

TEST_CASE("stream file round-trip preserves float32 payload and header") {
  TempDir tmp;
  const std::string path = tmp.file("frames.kws");
  Rng rng(3);
  std::vector<Eigen::VectorXd> frames;
  {
    StreamWriter writer(path, StreamKind::kPosteriors, 5, 10.0);
    for (int t = 0; t < 17; ++t) {
      Eigen::VectorXd f =
          Eigen::VectorXd::NullaryExpr(5, [&] { return rng.normal(); });
      // store what float32 keeps so the comparison below is exact
      for (int i = 0; i < 5; ++i) f[i] = static_cast<float>(f[i]);
      writer.write_frame(f);
      frames.push_back(f);
    }
    writer.close();
  }
  StreamReader reader(path);
  CHECK(reader.kind() == StreamKind::kPosteriors);
  CHECK(reader.dim() == 5);
  CHECK(reader.frame_period_ms() == 10.0);
  CHECK(reader.frame_count() == 17);
  auto back = reader.read_all();
  REQUIRE(back.size() == frames.size());
  for (std::size_t t = 0; t < back.size(); ++t) {
    CHECK(back[t] == frames[t]);
  }
}

TEST_CASE("stream reader supports incremental reads") {
  TempDir tmp;
  const std::string path = tmp.file("inc.kws");
  {
    StreamWriter writer(path, StreamKind::kFeatures, 2, 10.0);
    for (int t = 0; t < 10; ++t) {
      writer.write_frame(Eigen::Vector2d(t, -t));
    }
  }
  StreamReader reader(path);
  std::vector<Eigen::VectorXd> frames;
  CHECK(reader.read_frames(4, &frames) == 4);
  CHECK(reader.read_frames(100, &frames) == 6);
  CHECK(reader.read_frames(1, &frames) == 0);
  CHECK(frames.size() == 10);
  CHECK(frames[7][0] == 7.0);
}

TEST_CASE("stream reader rejects bad magic and ragged payloads") {
  TempDir tmp;
  const std::string bad = tmp.file("bad.kws");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "NOTMAGIC" << std::string(12, '\0');
  }
  CHECK_THROWS_AS(StreamReader{bad}, DataError);

  const std::string ragged = tmp.file("ragged.kws");
  {
    StreamWriter writer(ragged, StreamKind::kScores, 3, 10.0);
    writer.write_frame(Eigen::Vector3d(1, 2, 3));
  }
  // chop two bytes off the payload
  auto size = fs::file_size(ragged);
  fs::resize_file(ragged, size - 2);
  CHECK_THROWS_AS(StreamReader{ragged}, DataError);

  CHECK_THROWS_AS(StreamReader{tmp.file("missing.kws")}, DataError);
}

TEST_CASE("stream writer rejects mismatched frame dimensions") {
  TempDir tmp;
  StreamWriter writer(tmp.file("dims.kws"), StreamKind::kFeatures, 4, 10.0);
  CHECK_THROWS_AS(writer.write_frame(Eigen::Vector3d(1, 2, 3)),
                  InvalidArgument);
}

TEST_CASE("wav round-trip recovers 16-bit samples exactly") {
  TempDir tmp;
  const std::string path = tmp.file("tone.wav");
  Rng rng(8);
  std::vector<double> samples(1234);
  for (auto& s : samples) {
    s = std::floor(rng.uniform(-32768.0, 32767.0)) / 32768.0;
  }
  wav::write(path, samples, 16000);
  auto audio = wav::read(path);
  CHECK(audio.sample_rate == 16000);
  REQUIRE(audio.samples.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(audio.samples[i] == doctest::Approx(samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("wav reader rejects non-PCM and truncated files") {
  TempDir tmp;
  const std::string path = tmp.file("trunc.wav");
  wav::write(path, std::vector<double>(100, 0.25), 16000);
  fs::resize_file(path, 30);
  CHECK_THROWS_AS(wav::read(path), DataError);

  const std::string garbage = tmp.file("garbage.wav");
  {
    std::ofstream out(garbage, std::ios::binary);
    out << "RIFFxxxxJUNK";
  }
  CHECK_THROWS_AS(wav::read(garbage), DataError);
}
