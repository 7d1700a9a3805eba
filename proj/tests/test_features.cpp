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

#include "features.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

#include "common.hpp"
#include "support/test_util.hpp"

using namespace ctcspot;
using namespace ctcspot::features;

namespace {

// Independent reference: naive DFT power spectrum + freshly derived HTK mel
// triangles, used only to cross-check the production filterbank.
std::vector<double> oracle_mel_frame(const std::vector<double>& samples,
                                     std::size_t offset) {
  std::vector<double> windowed(kWindowSamples);
  for (int n = 0; n < kWindowSamples; ++n) {
    const double w =
        0.54 - 0.46 * std::cos(2.0 * M_PI * n / (kWindowSamples - 1));
    windowed[n] = samples[offset + n] * w;
  }
  const int bins = kFftSize / 2 + 1;
  std::vector<double> power(bins, 0.0);
  for (int k = 0; k < bins; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int n = 0; n < kWindowSamples; ++n) {
      const double ang = -2.0 * M_PI * k * n / kFftSize;
      acc += windowed[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    power[k] = std::norm(acc);
  }
  auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto hz = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  const double top = mel(8000.0);
  std::vector<double> out(kNumMelBins, 0.0);
  for (int m = 0; m < kNumMelBins; ++m) {
    const double lo = hz(top * m / (kNumMelBins + 1));
    const double mid = hz(top * (m + 1) / (kNumMelBins + 1));
    const double hi = hz(top * (m + 2) / (kNumMelBins + 1));
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * kSampleRate / kFftSize;
      double v = 0.0;
      if (f > lo && f <= mid) v = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) v = (hi - f) / (hi - mid);
      out[m] += v * power[k];
    }
    out[m] = std::log(std::max(out[m], kLogFloor));
  }
  return out;
}

FrameSequence random_frames(Rng& rng, int count, int dim) {
  FrameSequence frames(count);
  for (auto& f : frames) {
    f = Eigen::VectorXd::NullaryExpr(dim, [&] { return rng.normal(); });
  }
  return frames;
}

}  // namespace

TEST_CASE("zero signal hits the log floor on all 98 frames") {
  std::vector<double> samples(16000, 0.0);
  auto frames = extract_filterbank(samples, kSampleRate);
  REQUIRE(frames.size() == 98);
  const double floor_val = std::log(kLogFloor);
  for (const auto& f : frames) {
    REQUIRE(f.size() == kStaticDim);
    for (int i = 0; i < f.size(); ++i) CHECK(f[i] == floor_val);
  }
}

TEST_CASE("static dimension is 41 and full feature dimension is 123") {
  CHECK(kStaticDim == 41);
  CHECK(kFeatureDim == 123);
  std::vector<double> samples(800, 0.01);
  auto frames = append_deltas(extract_filterbank(samples, kSampleRate));
  REQUIRE(!frames.empty());
  CHECK(frames[0].size() == 123);
}

TEST_CASE("frame count follows the window/hop arithmetic") {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 400 + rng.uniform_index(20000);
    std::vector<double> samples(n, 0.0);
    auto frames = extract_filterbank(samples, kSampleRate);
    CHECK(frames.size() == (n - 400) / 160 + 1);
  }
}

TEST_CASE("inputs shorter than one window are rejected") {
  std::vector<double> samples(399, 0.0);
  CHECK_THROWS_AS(extract_filterbank(samples, kSampleRate), InvalidArgument);
  CHECK_THROWS_AS(extract_filterbank({}, kSampleRate), InvalidArgument);
  std::vector<double> ok(400, 0.0);
  CHECK_THROWS_AS(extract_filterbank(ok, 8000), InvalidArgument);
}

TEST_CASE("1 kHz sine peaks in the mel band bracketing 1 kHz") {
  std::vector<double> samples(16000);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    samples[n] = std::sin(2.0 * M_PI * 1000.0 * n / kSampleRate);
  }
  auto frames = extract_filterbank(samples, kSampleRate);
  const auto centers = mel_center_frequencies();
  // band whose center is the last one at or below 1 kHz
  int below = 0;
  while (below + 1 < kNumMelBins && centers[below + 1] <= 1000.0) ++below;
  REQUIRE(centers[below] <= 1000.0);
  REQUIRE(centers[below + 1] > 1000.0);
  for (std::size_t t = 0; t < frames.size(); t += 7) {
    int impl_argmax = 0;
    frames[t].head(kNumMelBins).maxCoeff(&impl_argmax);
    CHECK((impl_argmax == below || impl_argmax == below + 1));
    auto reference = oracle_mel_frame(samples, t * kHopSamples);
    int ref_argmax = 0;
    for (int m = 1; m < kNumMelBins; ++m) {
      if (reference[m] > reference[ref_argmax]) ref_argmax = m;
    }
    CHECK(impl_argmax == ref_argmax);
    for (int m = 0; m < kNumMelBins; ++m) {
      CHECK(frames[t][m] == doctest::Approx(reference[m]).epsilon(1e-6));
    }
  }
}

TEST_CASE("deltas of a constant sequence are exactly zero") {
  FrameSequence statics(6, Eigen::VectorXd::Constant(5, 3.25));
  auto full = append_deltas(statics);
  for (const auto& f : full) {
    CHECK(f.segment(5, 10).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("deltas of a linear ramp equal its slope in the interior") {
  const double slope = 0.37;
  const int T = 12;
  FrameSequence statics(T);
  for (int t = 0; t < T; ++t) {
    statics[t] = Eigen::VectorXd::Constant(3, slope * t);
  }
  auto full = append_deltas(statics);
  // edge replication flattens the first/last two deltas; the double-delta
  // is zero once all five delta taps are interior
  for (int t = 2; t <= T - 3; ++t) {
    for (int d = 0; d < 3; ++d) {
      CHECK(full[t][3 + d] == doctest::Approx(slope).epsilon(1e-12));
    }
  }
  for (int t = 4; t <= T - 5; ++t) {
    for (int d = 0; d < 3; ++d) {
      CHECK(full[t][6 + d] == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("deltas match a direct regression evaluation") {
  Rng rng(21);
  FrameSequence statics = random_frames(rng, 10, 4);
  auto full = append_deltas(statics);
  const int T = 10;
  auto clamp = [T](int i) { return i < 0 ? 0 : (i >= T ? T - 1 : i); };
  FrameSequence delta(T);
  for (int t = 0; t < T; ++t) {
    delta[t] = (statics[clamp(t + 1)] - statics[clamp(t - 1)] +
                2.0 * (statics[clamp(t + 2)] - statics[clamp(t - 2)])) /
               10.0;
  }
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd dd = (delta[clamp(t + 1)] - delta[clamp(t - 1)] +
                          2.0 * (delta[clamp(t + 2)] - delta[clamp(t - 2)])) /
                         10.0;
    CHECK((full[t].segment(4, 4) - delta[t]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((full[t].segment(8, 4) - dd).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("append_deltas rejects empty input") {
  CHECK_THROWS_AS(append_deltas({}), InvalidArgument);
}

TEST_CASE("normalizer uses the population convention and the std floor") {
  FrameSequence frames = {Eigen::VectorXd::Constant(2, 0.0),
                          Eigen::VectorXd::Constant(2, 2.0)};
  frames[0][1] = 5.0;  // second dim constant
  frames[1][1] = 5.0;
  auto stats = fit_normalizer(frames);
  CHECK(stats.mean[0] == doctest::Approx(1.0));
  CHECK(stats.std[0] == doctest::Approx(1.0));  // sqrt(((0-1)^2+(2-1)^2)/2)
  CHECK(stats.std[1] == NormalizerStats::kStdFloor);
  CHECK_THROWS_AS(fit_normalizer({frames[0]}), InvalidArgument);
}

TEST_CASE("normalizer matches an independent two-pass computation") {
  Rng rng(33);
  FrameSequence frames = random_frames(rng, 50, 7);
  auto stats = fit_normalizer(frames);
  for (int d = 0; d < 7; ++d) {
    double sum = 0.0;
    for (const auto& f : frames) sum += f[d];
    const double mean = sum / 50.0;
    double sq = 0.0;
    for (const auto& f : frames) sq += (f[d] - mean) * (f[d] - mean);
    const double sd = std::sqrt(sq / 50.0);
    CHECK(stats.mean[d] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(stats.std[d] == doctest::Approx(sd).epsilon(1e-12));
  }
}

TEST_CASE("normalizing the fitting set gives zero mean and unit std") {
  Rng rng(34);
  FrameSequence frames = random_frames(rng, 64, 9);
  auto stats = fit_normalizer(frames);
  auto normed = normalize(frames, stats);
  for (int d = 0; d < 9; ++d) {
    double mean = 0.0;
    for (const auto& f : normed) mean += f[d];
    mean /= 64.0;
    double var = 0.0;
    for (const auto& f : normed) var += (f[d] - mean) * (f[d] - mean);
    var /= 64.0;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
  }
}

TEST_CASE("identity stats leave frames unchanged; mean frame maps to zero") {
  Rng rng(35);
  FrameSequence frames = random_frames(rng, 5, 6);
  NormalizerStats id;
  id.mean = Eigen::VectorXd::Zero(6);
  id.std = Eigen::VectorXd::Ones(6);
  auto normed = normalize(frames, id);
  for (int t = 0; t < 5; ++t) CHECK(normed[t] == frames[t]);

  auto stats = fit_normalizer(frames);
  Eigen::VectorXd zeroed = normalize_frame(stats.mean, stats);
  CHECK(zeroed.cwiseAbs().maxCoeff() == 0.0);

  NormalizerStats bad;
  bad.mean = Eigen::VectorXd::Zero(4);
  bad.std = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(normalize(frames, bad), InvalidArgument);
}

TEST_CASE("pipeline output is finite for arbitrary finite input") {
  Rng rng(36);
  std::vector<double> samples(4000);
  for (auto& s : samples) s = rng.uniform(-1.0, 1.0) * rng.uniform();
  auto frames = append_deltas(extract_filterbank(samples, kSampleRate));
  for (const auto& f : frames) CHECK(f.allFinite());
}

TEST_CASE("streaming extraction matches batch for any chunking") {
  Rng rng(37);
  std::vector<double> samples(6400);
  for (auto& s : samples) s = rng.uniform(-0.5, 0.5);
  auto batch = append_deltas(extract_filterbank(samples, kSampleRate));

  for (int trial = 0; trial < 3; ++trial) {
    StreamingExtractor ext(kSampleRate);
    FrameSequence streamed;
    std::size_t pos = 0;
    while (pos < samples.size()) {
      const std::size_t n =
          std::min<std::size_t>(1 + rng.uniform_index(700), samples.size() - pos);
      auto part = ext.feed(samples.data() + pos, n);
      streamed.insert(streamed.end(), part.begin(), part.end());
      pos += n;
    }
    auto tail = ext.finish();
    streamed.insert(streamed.end(), tail.begin(), tail.end());

    REQUIRE(streamed.size() == batch.size());
    for (std::size_t t = 0; t < batch.size(); ++t) {
      CHECK((streamed[t] - batch[t]).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}
