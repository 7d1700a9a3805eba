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

#include "train.hpp"

#include <doctest.h>

#include "support/test_util.hpp"

using namespace ctcspot;
using net::Vec;

namespace {

constexpr int kBlank = 29;
constexpr int kBoundary = 28;

train::Utterance make_utterance(Rng& rng, int frames, int dim,
                                LabelSequence labels) {
  train::Utterance utt;
  utt.id = "utt";
  utt.frames.resize(frames);
  for (auto& f : utt.frames) {
    f = Vec::NullaryExpr(dim, [&] { return rng.normal(); });
  }
  utt.labels = std::move(labels);
  return utt;
}

}  // namespace

TEST_CASE("zero learning rate leaves the parameters untouched") {
  Rng rng(41);
  net::NetworkConfig cfg;
  cfg.input_dim = 4;
  cfg.layer_sizes = {5};
  cfg.output_dim = 30;
  cfg.unroll_length = 16;
  cfg.update_period = 8;
  cfg.learning_rate = 0.0;
  net::NetworkParams init = net::NetworkParams::init(cfg, rng);
  net::NetworkParams reference = init;

  std::vector<train::Utterance> corpus = {
      make_utterance(rng, 10, 4, {0, 1, kBoundary})};
  train::TrainOptions opts;
  opts.max_updates = 25;
  auto result = train_stream(cfg, std::move(init), corpus, {}, kBlank,
                             kBoundary, opts);
  CHECK(result.updates == 25);

  auto a = net::tensor_refs(result.params);
  auto b = net::tensor_refs(reference);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t n = static_cast<std::size_t>(a[i].rows) * a[i].cols;
    for (std::size_t j = 0; j < n; ++j) CHECK(a[i].data[j] == b[i].data[j]);
  }
}

TEST_CASE("a single short utterance is overfit to near-zero loss") {
  Rng rng(43);
  net::NetworkConfig cfg;
  cfg.input_dim = 6;
  cfg.layer_sizes = {16, 16, 16};
  cfg.output_dim = 30;
  cfg.unroll_length = 32;
  cfg.update_period = 16;
  cfg.learning_rate = 0.5;
  net::NetworkParams init = net::NetworkParams::init(cfg, rng);

  // transcript ends with the boundary so the stream inserts nothing extra
  std::vector<train::Utterance> corpus = {
      make_utterance(rng, 20, 6, {2, 0, 19, kBoundary})};
  train::TrainOptions opts;
  opts.max_updates = 2000;
  auto result = train_stream(cfg, std::move(init), corpus, {}, kBlank,
                             kBoundary, opts);
  REQUIRE(!result.loss_log.empty());
  double best = result.loss_log.front().loss_per_label;
  for (const auto& p : result.loss_log) best = std::min(best, p.loss_per_label);
  CHECK(best < 0.1);
}

TEST_CASE("window gradient equals full BPTT for a contained utterance") {
  Rng rng(47);
  net::NetworkConfig cfg;
  cfg.input_dim = 5;
  cfg.layer_sizes = {6, 6};
  cfg.output_dim = 30;
  cfg.unroll_length = 32;
  cfg.update_period = 16;
  net::NetworkParams params = net::NetworkParams::init(cfg, rng);

  const LabelSequence labels = {4, 8, 15, kBoundary};
  auto utt = make_utterance(rng, 20, 5, labels);
  // the stream continues past the utterance; pad with more random frames
  std::vector<Vec> window = utt.frames;
  for (int t = 20; t < 32; ++t) {
    window.push_back(Vec::NullaryExpr(5, [&] { return rng.normal(); }));
  }

  auto zero = net::StreamState::zero(cfg);
  auto windowed = train::window_gradient(
      params, window, zero, {{0, 20, labels}}, kBlank);
  auto full = train::window_gradient(
      params, std::span<const Vec>(utt.frames.data(), 20), zero,
      {{0, 20, labels}}, kBlank);

  auto a = net::tensor_refs(windowed.grads);
  auto b = net::tensor_refs(full.grads);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t n = static_cast<std::size_t>(a[i].rows) * a[i].cols;
    for (std::size_t j = 0; j < n; ++j) {
      max_rel = std::max(max_rel, testutil::rel_err(a[i].data[j], b[i].data[j],
                                                    1e-9));
    }
  }
  CHECK(max_rel < 1e-6);
  CHECK(windowed.loss_sum == doctest::Approx(full.loss_sum).epsilon(1e-12));
}

TEST_CASE("empty corpus and dimension mismatches are rejected") {
  Rng rng(53);
  net::NetworkConfig cfg;
  cfg.input_dim = 4;
  cfg.layer_sizes = {4};
  cfg.output_dim = 30;
  cfg.unroll_length = 8;
  cfg.update_period = 4;
  net::NetworkParams init = net::NetworkParams::init(cfg, rng);
  train::TrainOptions opts;
  opts.max_updates = 1;
  CHECK_THROWS_AS(
      train_stream(cfg, net::NetworkParams(init), {}, {}, kBlank, kBoundary,
                   opts),
      InvalidArgument);

  std::vector<train::Utterance> corpus = {
      make_utterance(rng, 6, 9, {1, kBoundary})};  // wrong dim
  CHECK_THROWS_AS(
      train_stream(cfg, std::move(init), corpus, {}, kBlank, kBoundary, opts),
      DataError);
}

TEST_CASE("infeasible segments are skipped, not fatal") {
  Rng rng(59);
  net::NetworkConfig cfg;
  cfg.input_dim = 4;
  cfg.layer_sizes = {4};
  cfg.output_dim = 30;
  cfg.unroll_length = 12;
  cfg.update_period = 6;
  cfg.learning_rate = 0.05;
  net::NetworkParams init = net::NetworkParams::init(cfg, rng);

  // 3 frames cannot carry 5 labels; 8 frames carry 2 labels fine
  std::vector<train::Utterance> corpus = {
      make_utterance(rng, 3, 4, {0, 1, 2, 3, 4}),
      make_utterance(rng, 8, 4, {5, kBoundary}),
  };
  train::TrainOptions opts;
  opts.max_updates = 40;
  auto result = train_stream(cfg, std::move(init), corpus, {}, kBlank,
                             kBoundary, opts);
  CHECK(result.segments_trained > 0);
  CHECK(result.segments_skipped > 0);
}
