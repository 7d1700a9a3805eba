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

// End-to-end checks of the command-line binary (subprocess level).

#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef CTCSPOT_CLI_PATH
#error "CTCSPOT_CLI_PATH must point at the built binary"
#endif

const char* cli() { return CTCSPOT_CLI_PATH; }

int run(const std::string& args) {
  const std::string cmd =
      std::string(cli()) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() /
           ("ctcspot_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(n++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

const std::string kSynthFlags =
    " --sentences 10 --eval-sentences 6 --min-words 2 --max-words 4";

}  // namespace

TEST_CASE("usage problems exit with code 1") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("synth") == 1);                       // missing --out
  CHECK(run("synth --out /tmp/x --bogus 1") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("synth is deterministic under an explicit seed") {
  TempDir tmp;
  REQUIRE(run("synth --out " + tmp.file("a") + " --seed 7" + kSynthFlags) ==
          0);
  REQUIRE(run("synth --out " + tmp.file("b") + " --seed 7" + kSynthFlags) ==
          0);
  REQUIRE(run("synth --out " + tmp.file("c") + " --seed 8" + kSynthFlags) ==
          0);
  CHECK(slurp(tmp.path / "a/eval_stream.kws") ==
        slurp(tmp.path / "b/eval_stream.kws"));
  CHECK(slurp(tmp.path / "a/manifest.csv") == slurp(tmp.path / "b/manifest.csv"));
  CHECK(slurp(tmp.path / "a/eval_stream.kws") !=
        slurp(tmp.path / "c/eval_stream.kws"));
}

TEST_CASE("KWS_SEED is the seed fallback") {
  TempDir tmp;
  ::setenv("KWS_SEED", "99", 1);
  REQUIRE(run("synth --out " + tmp.file("env") + kSynthFlags) == 0);
  ::unsetenv("KWS_SEED");
  REQUIRE(run("synth --out " + tmp.file("seed99") + " --seed 99" +
              kSynthFlags) == 0);
  REQUIRE(run("synth --out " + tmp.file("plain") + kSynthFlags) == 0);
  CHECK(slurp(tmp.path / "env/eval_stream.kws") ==
        slurp(tmp.path / "seed99/eval_stream.kws"));
  CHECK(slurp(tmp.path / "env/eval_stream.kws") !=
        slurp(tmp.path / "plain/eval_stream.kws"));
}

TEST_CASE("invalid synth configuration is a usage error") {
  TempDir tmp;
  CHECK(run("synth --out " + tmp.file("x") + " --noise-std -1") == 1);
}

TEST_CASE("train on a missing corpus is a data error") {
  TempDir tmp;
  CHECK(run("train --corpus " + tmp.file("nope") + " --model " +
            tmp.file("m")) == 2);
}

TEST_CASE("the full pipeline runs and rejects bad mode combinations") {
  TempDir tmp;
  const std::string corpus = tmp.file("corpus");
  const std::string model = tmp.file("model.ctcspot");
  REQUIRE(run("synth --out " + corpus + " --seed 5" + kSynthFlags) == 0);
  REQUIRE(run("train --corpus " + corpus + " --model " + model +
              " --layers 12 --unroll 64 --update-period 32 --updates 8 "
              "--loss-log " +
              tmp.file("loss.csv") + " --quiet") == 0);
  REQUIRE(fs::exists(model));
  REQUIRE(fs::exists(tmp.file("loss.csv")));

  const std::string base = "spot --model " + model + " --input " + corpus +
                           "/eval_stream.kws --keywords " + corpus +
                           "/keywords_long.txt";
  // sum semantics is undefined under the filler model
  CHECK(run(base + " --out " + tmp.file("d.csv") +
            " --mode filler --semantics sum") == 1);
  REQUIRE(run(base + " --out " + tmp.file("d1.csv") +
              " --scores " + tmp.file("s.kws")) == 0);
  REQUIRE(run(base + " --out " + tmp.file("d2.csv") +
              " --mode filler --semantics max") == 0);

  // chunking is an I/O detail: detection CSVs are byte-identical
  REQUIRE(run(base + " --out " + tmp.file("chunk7.csv") +
              " --chunk-frames 7") == 0);
  CHECK(slurp(tmp.path / "d1.csv") == slurp(tmp.path / "chunk7.csv"));

  REQUIRE(run("eval --scores " + tmp.file("s.kws") + " --keywords " + corpus +
              "/keywords_long.txt --truth " + corpus +
              "/truth.csv --sweep 0:6:12 --pr-out " + tmp.file("pr.csv")) ==
          0);
  REQUIRE(fs::exists(tmp.file("pr.csv")));
  {
    std::ifstream pr(tmp.file("pr.csv"));
    std::string header;
    std::getline(pr, header);
    CHECK(header == "threshold,precision,recall,f1");
    int rows = 0;
    std::string line;
    while (std::getline(pr, line)) {
      if (!line.empty()) ++rows;
    }
    CHECK(rows == 12);
  }

  REQUIRE(run("eval --detections " + tmp.file("d1.csv") + " --keywords " +
              corpus + "/keywords_long.txt --truth " + corpus +
              "/truth.csv") == 0);

  // a single-point sweep is legal
  CHECK(run("eval --scores " + tmp.file("s.kws") + " --keywords " + corpus +
            "/keywords_long.txt --truth " + corpus +
            "/truth.csv --sweep 1:1:1") == 0);
  // both input modes at once is a usage error
  CHECK(run("eval --detections " + tmp.file("d1.csv") + " --scores " +
            tmp.file("s.kws") + " --truth " + corpus + "/truth.csv") == 1);

  // posterior/score stream confusion is a data error
  CHECK(run("spot --model " + model + " --input " + tmp.file("s.kws") +
            " --keywords " + corpus + "/keywords_long.txt --out " +
            tmp.file("bad.csv")) == 2);
}
