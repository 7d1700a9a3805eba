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

#ifndef CTCSPOT_FEATURES_HPP
#define CTCSPOT_FEATURES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace ctcspot {
namespace features {

// Front-end constants. 16 kHz mono input, 25 ms Hamming window, 10 ms hop,
// 40 triangular mel filters spanning 0..8000 Hz (HTK mel scale), natural
// log, magnitudes floored at kLogFloor before the log.
inline constexpr int kSampleRate = 16000;
inline constexpr int kWindowSamples = 400;
inline constexpr int kHopSamples = 160;
inline constexpr int kFftSize = 512;
inline constexpr int kNumMelBins = 40;
inline constexpr int kStaticDim = kNumMelBins + 1;  // + log frame energy
inline constexpr int kFeatureDim = 3 * kStaticDim;  // static + delta + ddelta
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kFramePeriodMs = 10.0;

using Frame = Eigen::VectorXd;
using FrameSequence = std::vector<Frame>;

// 40 log-mel energies + log frame energy per 10 ms frame.
// Frame count is floor((N - 400) / 160) + 1; throws InvalidArgument when the
// input is shorter than one window or the rate is not 16 kHz.
FrameSequence extract_filterbank(const std::vector<double>& samples,
                                 int sample_rate);

// Append delta and double-delta blocks (regression over +-2 neighbors with
// edge replication). 41-dim static frames become 123-dim feature frames.
FrameSequence append_deltas(const FrameSequence& static_frames);

struct NormalizerStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // floored at kStdFloor

  static constexpr double kStdFloor = 1e-5;
};

// Per-dimension sample mean and population (1/N) standard deviation.
// Requires at least two frames.
NormalizerStats fit_normalizer(const FrameSequence& frames);

// (x - mean) / std, elementwise.
FrameSequence normalize(const FrameSequence& frames,
                        const NormalizerStats& stats);
Frame normalize_frame(const Frame& frame, const NormalizerStats& stats);

// Center frequencies (Hz) of the mel filters, exposed for diagnostics.
std::vector<double> mel_center_frequencies();

// Incremental front end: feed arbitrary sample chunks, collect finished
// 123-dim frames as they become available. The delta regression needs two
// future frames, so output trails the input by two frames until finish().
// Chunking does not change the output: feeding a stream in any pieces and
// calling finish() yields exactly append_deltas(extract_filterbank(all)).
class StreamingExtractor {
 public:
  explicit StreamingExtractor(int sample_rate);

  // Returns any frames completed by this chunk.
  FrameSequence feed(const double* samples, std::size_t count);
  // Flushes the tail (edge-replicated deltas for the last two frames).
  FrameSequence finish();
  void reset();

 private:
  FrameSequence emit_ready(bool flush);

  std::vector<double> sample_buf_;
  FrameSequence static_buf_;  // window of statics [base_, base_ + size)
  std::size_t emitted_ = 0;   // number of feature frames handed out
  std::size_t base_ = 0;      // absolute index of static_buf_.front()
};

}  // namespace features
}  // namespace ctcspot

#endif  // CTCSPOT_FEATURES_HPP
