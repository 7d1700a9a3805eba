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

#include "decoder.hpp"

#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "support/decoder_oracle.hpp"
#include "support/test_util.hpp"

using namespace ctcspot;
using kws::Semantics;

namespace {

const Alphabet kFull = Alphabet::standard();
// tiny alphabet keeps the brute-force path enumeration cheap
const Alphabet kMini({'a', 'b', '_', '-'}, 3, 2);

Eigen::VectorXd one_hot(const Alphabet& alpha, char c) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(alpha.size());
  v[alpha.index_of(c)] = 1.0;
  return v;
}

std::vector<std::pair<int, int>> every_frame_entry(int frames, int entry) {
  std::vector<std::pair<int, int>> inj;
  for (int t = 0; t < frames; ++t) inj.push_back({t, entry});
  return inj;
}

}  // namespace

TEST_CASE("keyword network construction") {
  auto net = kws::build_keyword_network("Hi", kFull, 1.5);
  CHECK(net.text == "hi");
  CHECK(net.num_nodes() == 4);
  CHECK(net.num_states() == 8);
  CHECK(net.threshold == doctest::Approx(3.0));
  CHECK(net.node_labels.front() == kFull.boundary());
  CHECK(net.node_labels.back() == kFull.boundary());

  CHECK_THROWS_AS(kws::build_keyword_network("", kFull, 1.0),
                  InvalidArgument);
  CHECK_THROWS_AS(kws::build_keyword_network("caf\xc3\xa9", kFull, 1.0),
                  InvalidArgument);
  CHECK_THROWS_AS(kws::build_keyword_network("a_b", kFull, 1.0),
                  InvalidArgument);
}

TEST_CASE("one-hot spelling drives the keyword posterior to zero") {
  for (Semantics sem : {Semantics::kSum, Semantics::kMax}) {
    kws::KeywordOnlyDecoder dec(kws::build_keyword_network("hi", kFull, 1.0),
                                kFull, sem);
    std::vector<double> scores;
    for (char c : {'_', 'h', 'i', '_'}) {
      scores.push_back(dec.step(one_hot(kFull, c)));
    }
    CHECK(scores[0] == kLogZero);
    CHECK(scores[1] == kLogZero);
    CHECK(scores[2] == kLogZero);
    CHECK(scores[3] == 0.0);  // a probability-one path reached the exit

    // detection fires for any threshold strictly above zero path cost
    auto events = kws::detect(scores, -0.5, 10);
    REQUIRE(events.size() == 1);
    CHECK(events[0].frame == 3);
    CHECK(events[0].score == 0.0);
  }
}

TEST_CASE("keyword-only state values match exhaustive enumeration") {
  Rng rng(71);
  int cases = 0;
  while (cases < 220) {
    const int kw_len = 1 + static_cast<int>(rng.uniform_index(2));  // 1..2
    std::string keyword;
    for (int i = 0; i < kw_len; ++i) {
      keyword.push_back(rng.uniform() < 0.5 ? 'a' : 'b');
    }
    const int T = 1 + static_cast<int>(rng.uniform_index(8));
    Eigen::MatrixXd stream =
        testutil::random_posteriors(rng, T, kMini.size(), 2.0);
    for (Semantics sem : {Semantics::kSum, Semantics::kMax}) {
      kws::KeywordOnlyDecoder dec(
          kws::build_keyword_network(keyword, kMini, 1.0), kMini, sem);
      testutil::DecoderOracle oracle(dec.graph(), sem);
      auto expected =
          oracle.state_values(stream, every_frame_entry(T, 0));
      for (int t = 0; t < T; ++t) {
        dec.step(stream.row(t).transpose());
        const auto& got = dec.state_values();
        for (std::size_t s = 0; s < got.size(); ++s) {
          if (expected[t][s] == kLogZero) {
            CHECK(got[s] == kLogZero);
          } else {
            CHECK(std::abs(got[s] - expected[t][s]) < 1e-10);
          }
        }
      }
    }
    ++cases;
  }
}

TEST_CASE("sum semantics dominates max semantics everywhere") {
  Rng rng(73);
  for (int rep = 0; rep < 40; ++rep) {
    const int T = 1 + static_cast<int>(rng.uniform_index(10));
    Eigen::MatrixXd stream =
        testutil::random_posteriors(rng, T, kMini.size(), 2.0);
    kws::KeywordOnlyDecoder sum_dec(
        kws::build_keyword_network("ab", kMini, 1.0), kMini, Semantics::kSum);
    kws::KeywordOnlyDecoder max_dec(
        kws::build_keyword_network("ab", kMini, 1.0), kMini, Semantics::kMax);
    for (int t = 0; t < T; ++t) {
      const double s_out = sum_dec.step(stream.row(t).transpose());
      const double m_out = max_dec.step(stream.row(t).transpose());
      CHECK(s_out >= m_out - 1e-12);
      for (std::size_t s = 0; s < sum_dec.state_values().size(); ++s) {
        CHECK(sum_dec.state_values()[s] >= max_dec.state_values()[s] - 1e-12);
      }
      // keyword-only values are log probabilities
      for (double v : sum_dec.state_values()) CHECK(v <= 1e-12);
    }
  }
}

TEST_CASE("transitions between equal labels must pass through the blank") {
  // With only 4 frames, `_ a a _` is spellable only via the forbidden
  // direct a -> a hop; the correct decoder scores it as impossible.
  kws::KeywordOnlyDecoder dec(kws::build_keyword_network("aa", kMini, 1.0),
                              kMini, Semantics::kSum);
  double score = 0.0;
  for (char c : {'_', 'a', 'a', '_'}) score = dec.step(one_hot(kMini, c));
  CHECK(score == kLogZero);

  // five frames leave room for `_ a - a _`
  dec.reset();
  for (char c : {'_', 'a', '-', 'a', '_'}) score = dec.step(one_hot(kMini, c));
  CHECK(score == 0.0);

  // the oracle agrees with the decoder only when the graph forbids the
  // same-label skip; adding that edge changes the values
  Rng rng(79);
  bool saw_discrepancy = false;
  for (int rep = 0; rep < 20; ++rep) {
    const int T = 4 + static_cast<int>(rng.uniform_index(4));
    Eigen::MatrixXd stream =
        testutil::random_posteriors(rng, T, kMini.size(), 2.0);
    kws::KeywordOnlyDecoder d2(kws::build_keyword_network("aa", kMini, 1.0),
                               kMini, Semantics::kSum);
    kws::StateGraph wrong = d2.graph();
    wrong.preds[4].push_back(2);  // first 'a' label -> second 'a' label
    testutil::DecoderOracle good_oracle(d2.graph(), Semantics::kSum);
    testutil::DecoderOracle wrong_oracle(wrong, Semantics::kSum);
    auto good = good_oracle.state_values(stream, every_frame_entry(T, 0));
    auto bad = wrong_oracle.state_values(stream, every_frame_entry(T, 0));
    for (int t = 0; t < T; ++t) {
      d2.step(stream.row(t).transpose());
      const auto& got = d2.state_values();
      for (std::size_t s = 0; s < got.size(); ++s) {
        if (good[t][s] == kLogZero) {
          CHECK(got[s] == kLogZero);
        } else {
          CHECK(std::abs(got[s] - good[t][s]) < 1e-10);
        }
        if (std::abs(got[s] - bad[t][s]) > 1e-9 ||
            (got[s] == kLogZero) != (bad[t][s] == kLogZero)) {
          saw_discrepancy = true;
        }
      }
    }
  }
  CHECK(saw_discrepancy);
}

TEST_CASE("filler model absorbs non-keyword speech") {
  kws::KeywordFillerDecoder dec({kws::build_keyword_network("hi", kFull, 1.0)},
                                kFull);
  for (int t = 0; t < 6; ++t) {
    auto out = dec.step(one_hot(kFull, 'q'));
    CHECK(out.filler == 0.0);  // the q self-loop keeps probability one
    CHECK(out.keyword[0] == kLogZero);
    CHECK(out.statistic[0] == kLogZero);  // no boundary seen yet
  }
}

TEST_CASE("filler-model statistic reaches zero on a clean spelling") {
  kws::KeywordFillerDecoder dec({kws::build_keyword_network("hi", kFull, 1.0)},
                                kFull);
  kws::KeywordFillerDecoder::StepResult out;
  for (char c : {'_', 'h', 'i', '_'}) out = dec.step(one_hot(kFull, c));
  CHECK(out.keyword[0] == 0.0);
  CHECK(out.filler == 0.0);
  CHECK(out.statistic[0] == 0.0);
}

TEST_CASE("filler state values match exhaustive enumeration") {
  Rng rng(83);
  for (int rep = 0; rep < 60; ++rep) {
    const int T = 1 + static_cast<int>(rng.uniform_index(6));
    Eigen::MatrixXd stream =
        testutil::random_posteriors(rng, T, kMini.size(), 2.0);
    std::string keyword = rng.uniform() < 0.5 ? "a" : "ab";
    kws::KeywordFillerDecoder dec(
        {kws::build_keyword_network(keyword, kMini, 1.0)}, kMini);
    testutil::DecoderOracle oracle(dec.graph(), Semantics::kMax);
    std::vector<std::pair<int, int>> inj;
    for (int i = 0; i < dec.filler_state_count() / 2; ++i) {
      inj.push_back({0, 2 * i});
    }
    inj.push_back({0, dec.keyword_state_range(0).first});
    auto expected = oracle.state_values(stream, inj);
    for (int t = 0; t < T; ++t) {
      dec.step(stream.row(t).transpose());
      const auto& got = dec.state_values();
      for (std::size_t s = 0; s < got.size(); ++s) {
        if (expected[t][s] == kLogZero) {
          CHECK(got[s] == kLogZero);
        } else {
          CHECK(std::abs(got[s] - expected[t][s]) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("keyword branch isolated from the filler equals keyword-only max") {
  Rng rng(89);
  for (int rep = 0; rep < 30; ++rep) {
    const int T = 1 + static_cast<int>(rng.uniform_index(8));
    Eigen::MatrixXd stream =
        testutil::random_posteriors(rng, T, kMini.size(), 2.0);
    kws::FillerOptions opts;
    opts.keyword_entry_from_filler = false;
    kws::KeywordFillerDecoder joint(
        {kws::build_keyword_network("ab", kMini, 1.0)}, kMini, opts);
    kws::KeywordOnlyDecoder solo(kws::build_keyword_network("ab", kMini, 1.0),
                                 kMini, Semantics::kMax);
    auto [first, last] = joint.keyword_state_range(0);
    for (int t = 0; t < T; ++t) {
      auto out = joint.step(stream.row(t).transpose());
      const double solo_score = solo.step(stream.row(t).transpose());
      for (int s = first; s < last; ++s) {
        const double a = joint.state_values()[s];
        const double b = solo.state_values()[s - first];
        if (b == kLogZero) {
          CHECK(a == kLogZero);
        } else {
          CHECK(std::abs(a - b) < 1e-12);
        }
      }
      if (solo_score == kLogZero) {
        CHECK(out.keyword[0] == kLogZero);
      } else {
        CHECK(std::abs(out.keyword[0] - solo_score) < 1e-12);
      }
    }
  }
}

TEST_CASE("reset restores the initial condition exactly") {
  Rng rng(97);
  Eigen::MatrixXd stream =
      testutil::random_posteriors(rng, 12, kFull.size(), 3.0);
  kws::KeywordOnlyDecoder dec(kws::build_keyword_network("abc", kFull, 1.0),
                              kFull, Semantics::kSum);
  std::vector<double> first;
  for (int t = 0; t < 12; ++t) first.push_back(dec.step(stream.row(t).transpose()));

  dec.reset();
  dec.reset();  // idempotent
  CHECK(dec.frames_seen() == 0);
  std::vector<double> second;
  for (int t = 0; t < 12; ++t) second.push_back(dec.step(stream.row(t).transpose()));
  for (int t = 0; t < 12; ++t) CHECK(first[t] == second[t]);

  // replay equality is independent of what ran before the reset
  Eigen::MatrixXd noise = testutil::random_posteriors(rng, 7, kFull.size());
  for (int t = 0; t < 7; ++t) dec.step(noise.row(t).transpose());
  dec.reset();
  std::vector<double> third;
  for (int t = 0; t < 12; ++t) third.push_back(dec.step(stream.row(t).transpose()));
  for (int t = 0; t < 12; ++t) CHECK(first[t] == third[t]);
}

TEST_CASE("detect: one event per region at the earliest peak") {
  // five consecutive frames above threshold produce one event at the peak
  std::vector<double> scores = {-9, -1, -2, -1, -0.5, -1, -9, -9};
  auto events = kws::detect(scores, -3.0, 2);
  REQUIRE(events.size() == 1);
  CHECK(events[0].frame == 4);
  CHECK(events[0].score == -0.5);

  // ties break toward the earliest frame
  std::vector<double> tie = {-9, -1, -1, -9, -9, -9};
  events = kws::detect(tie, -3.0, 1);
  REQUIRE(events.size() == 1);
  CHECK(events[0].frame == 1);

  // nothing above threshold
  CHECK(kws::detect(scores, 1.0, 2).empty());

  // two bursts separated by more than the refractory gap
  std::vector<double> two = {-1, -9, -9, -9, -9, -0.5, -9, -9, -9};
  events = kws::detect(two, -3.0, 3);
  REQUIRE(events.size() == 2);
  CHECK(events[0].frame == 0);
  CHECK(events[1].frame == 5);

  // a short dip merges into one event
  events = kws::detect(two, -3.0, 6);
  REQUIRE(events.size() == 1);
  CHECK(events[0].frame == 5);  // global peak of the merged region

  CHECK_THROWS_AS(kws::detect(two, kLogZero, 2), InvalidArgument);
}

TEST_CASE("raising the threshold never adds detections on bursty scores") {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    // unimodal bursts whose gaps always exceed the refractory window; a
    // single burst cannot split, so the region count is monotone
    std::vector<double> scores(400, -30.0);
    const int bursts = 2 + static_cast<int>(rng.uniform_index(3));
    for (int b = 0; b < bursts; ++b) {
      const int center = 30 + 80 * b + static_cast<int>(rng.uniform_index(20));
      const double height = -rng.uniform(0.0, 10.0);
      const int width = 3 + static_cast<int>(rng.uniform_index(6));
      for (int t = std::max(0, center - width);
           t < std::min(400, center + width + 1); ++t) {
        const double d = std::abs(t - center) / static_cast<double>(width);
        scores[t] = std::max(scores[t], height - 12.0 * d);
      }
    }
    std::size_t prev = SIZE_MAX;
    for (double thr = -12.0; thr <= 0.0; thr += 0.5) {
      const std::size_t count = kws::detect(scores, thr, 30).size();
      CHECK(count <= prev);
      prev = count;
    }
  }
}
