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

#include <cmath>
#include <complex>

#include "common.hpp"

namespace ctcspot {
namespace features {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// In-place iterative radix-2 FFT. kFftSize is a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

struct Tables {
  std::vector<double> window;                        // Hamming, 400 taps
  std::vector<std::pair<int, std::vector<double>>> mel;  // start bin + weights
  std::vector<double> centers_hz;

  Tables() {
    window.resize(kWindowSamples);
    for (int n = 0; n < kWindowSamples; ++n) {
      window[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (kWindowSamples - 1));
    }

    const int bins = kFftSize / 2 + 1;
    const double mel_hi = hz_to_mel(kSampleRate / 2.0);
    std::vector<double> edges(kNumMelBins + 2);
    for (int i = 0; i < kNumMelBins + 2; ++i) {
      edges[i] = mel_to_hz(mel_hi * i / (kNumMelBins + 1));
    }
    mel.resize(kNumMelBins);
    centers_hz.resize(kNumMelBins);
    for (int m = 0; m < kNumMelBins; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      centers_hz[m] = mid;
      std::vector<double> w;
      int start = -1;
      for (int k = 0; k < bins; ++k) {
        const double f = static_cast<double>(k) * kSampleRate / kFftSize;
        double v = 0.0;
        if (f > lo && f <= mid) {
          v = (f - lo) / (mid - lo);
        } else if (f > mid && f < hi) {
          v = (hi - f) / (hi - mid);
        }
        if (v > 0.0) {
          if (start < 0) start = k;
          w.push_back(v);
        } else if (start >= 0) {
          break;
        }
      }
      mel[m] = {start < 0 ? 0 : start, std::move(w)};
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

Frame static_frame(const double* samples) {
  const Tables& t = tables();
  std::vector<std::complex<double>> buf(kFftSize, {0.0, 0.0});
  double energy = 0.0;
  for (int n = 0; n < kWindowSamples; ++n) {
    const double v = samples[n] * t.window[n];
    buf[n] = {v, 0.0};
    energy += v * v;
  }
  fft(buf);

  Frame out(kStaticDim);
  const int bins = kFftSize / 2 + 1;
  std::vector<double> power(bins);
  for (int k = 0; k < bins; ++k) power[k] = std::norm(buf[k]);
  for (int m = 0; m < kNumMelBins; ++m) {
    const auto& [start, weights] = t.mel[m];
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] * power[start + static_cast<int>(i)];
    }
    out[m] = std::log(std::max(acc, kLogFloor));
  }
  out[kNumMelBins] = std::log(std::max(energy, kLogFloor));
  return out;
}

// Regression slope over +-2 neighbors with index clamping at the ends.
Frame regression(const FrameSequence& x, int t) {
  const int last = static_cast<int>(x.size()) - 1;
  auto clamp = [last](int i) { return i < 0 ? 0 : (i > last ? last : i); };
  return (1.0 * (x[clamp(t + 1)] - x[clamp(t - 1)]) +
          2.0 * (x[clamp(t + 2)] - x[clamp(t - 2)])) /
         10.0;
}

}  // namespace

FrameSequence extract_filterbank(const std::vector<double>& samples,
                                 int sample_rate) {
  if (sample_rate != kSampleRate) {
    throw InvalidArgument("features: only 16 kHz input is supported");
  }
  if (samples.size() < static_cast<std::size_t>(kWindowSamples)) {
    throw InvalidArgument("features: input shorter than one analysis window");
  }
  const std::size_t frames =
      (samples.size() - kWindowSamples) / kHopSamples + 1;
  FrameSequence out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    out.push_back(static_frame(samples.data() + f * kHopSamples));
  }
  return out;
}

FrameSequence append_deltas(const FrameSequence& static_frames) {
  if (static_frames.empty()) {
    throw InvalidArgument("features: no frames to differentiate");
  }
  const int T = static_cast<int>(static_frames.size());
  const int dim = static_cast<int>(static_frames[0].size());
  FrameSequence delta(T);
  for (int t = 0; t < T; ++t) delta[t] = regression(static_frames, t);
  FrameSequence out(T);
  for (int t = 0; t < T; ++t) {
    Frame f(3 * dim);
    f.segment(0, dim) = static_frames[t];
    f.segment(dim, dim) = delta[t];
    f.segment(2 * dim, dim) = regression(delta, t);
    out[t] = f;
  }
  return out;
}

NormalizerStats fit_normalizer(const FrameSequence& frames) {
  if (frames.size() < 2) {
    throw InvalidArgument("normalizer: need at least two frames");
  }
  const int dim = static_cast<int>(frames[0].size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const Frame& f : frames) mean += f;
  mean /= static_cast<double>(frames.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const Frame& f : frames) var += (f - mean).cwiseAbs2();
  var /= static_cast<double>(frames.size());
  NormalizerStats stats;
  stats.mean = mean;
  stats.std = var.cwiseSqrt().cwiseMax(NormalizerStats::kStdFloor);
  return stats;
}

Frame normalize_frame(const Frame& frame, const NormalizerStats& stats) {
  if (frame.size() != stats.mean.size()) {
    throw InvalidArgument("normalizer: dimension mismatch");
  }
  return (frame - stats.mean).cwiseQuotient(stats.std);
}

FrameSequence normalize(const FrameSequence& frames,
                        const NormalizerStats& stats) {
  FrameSequence out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(normalize_frame(f, stats));
  return out;
}

std::vector<double> mel_center_frequencies() { return tables().centers_hz; }

StreamingExtractor::StreamingExtractor(int sample_rate) {
  if (sample_rate != kSampleRate) {
    throw InvalidArgument("features: only 16 kHz input is supported");
  }
}

FrameSequence StreamingExtractor::feed(const double* samples,
                                       std::size_t count) {
  sample_buf_.insert(sample_buf_.end(), samples, samples + count);
  while (sample_buf_.size() >= static_cast<std::size_t>(kWindowSamples)) {
    static_buf_.push_back(static_frame(sample_buf_.data()));
    sample_buf_.erase(sample_buf_.begin(), sample_buf_.begin() + kHopSamples);
  }
  return emit_ready(false);
}

FrameSequence StreamingExtractor::finish() { return emit_ready(true); }

void StreamingExtractor::reset() {
  sample_buf_.clear();
  static_buf_.clear();
  emitted_ = 0;
  base_ = 0;
}

// The double-delta at frame t reaches four static frames ahead, so frame t
// is final once static frame t+4 exists (or at end of stream, where the
// regression clamps). Only a nine-frame window of statics is retained;
// the output is exactly append_deltas(extract_filterbank(whole input)).
FrameSequence StreamingExtractor::emit_ready(bool flush) {
  FrameSequence out;
  const long total = static_cast<long>(base_ + static_buf_.size());
  const long last = total - 1;
  auto clamp = [last](long i) { return i < 0 ? 0 : (i > last ? last : i); };
  auto stat = [&](long i) -> const Frame& {
    return static_buf_[static_cast<std::size_t>(clamp(i) - base_)];
  };
  auto delta_at = [&](long j) -> Frame {
    return (1.0 * (stat(j + 1) - stat(j - 1)) +
            2.0 * (stat(j + 2) - stat(j - 2))) /
           10.0;
  };
  while (static_cast<long>(emitted_) < total &&
         (flush || static_cast<long>(emitted_) + 4 < total)) {
    const long t = static_cast<long>(emitted_);
    const int dim = static_cast<int>(stat(t).size());
    Frame f(3 * dim);
    f.segment(0, dim) = stat(t);
    f.segment(dim, dim) = delta_at(t);
    f.segment(2 * dim, dim) =
        (1.0 * (delta_at(clamp(t + 1)) - delta_at(clamp(t - 1))) +
         2.0 * (delta_at(clamp(t + 2)) - delta_at(clamp(t - 2)))) /
        10.0;
    out.push_back(std::move(f));
    ++emitted_;
    while (base_ + 4 < emitted_) {
      static_buf_.erase(static_buf_.begin());
      ++base_;
    }
  }
  return out;
}

}  // namespace features
}  // namespace ctcspot
