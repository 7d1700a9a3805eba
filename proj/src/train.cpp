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

#include <deque>

#include "ctc.hpp"

namespace ctcspot {
namespace train {

namespace {

struct SegmentLoss {
  net::Mat dlogits;
  double loss_sum = 0.0;
  long label_count = 0;
  int used = 0;
  int infeasible = 0;
};

// CTC loss over each segment's logit rows; d loss / d logits normalized per
// target label. Infeasible segments are counted and skipped.
SegmentLoss segment_loss(const net::WindowCache& cache,
                         const std::vector<Segment>& segments, int blank) {
  const int T = cache.frames();
  SegmentLoss out;
  out.dlogits = net::Mat::Zero(T, cache.logits.cols());
  for (const Segment& seg : segments) {
    if (seg.start < 0 || seg.end > T || seg.start >= seg.end) {
      throw InvalidArgument("segment_loss: segment out of range");
    }
    const net::Mat logits =
        cache.logits.middleRows(seg.start, seg.end - seg.start);
    try {
      ctc::LossAndGrad lg = ctc::loss_and_grad(logits, seg.labels, blank);
      out.dlogits.middleRows(seg.start, seg.end - seg.start) += lg.grad_logits;
      out.loss_sum += lg.loss;
      out.label_count += static_cast<long>(seg.labels.size());
      ++out.used;
    } catch (const InvalidArgument&) {
      ++out.infeasible;
    }
  }
  if (out.label_count > 0) {
    out.dlogits /= static_cast<double>(out.label_count);
  }
  return out;
}

}  // namespace

WindowGradient window_gradient(const net::NetworkParams& params,
                               std::span<const net::Vec> frames,
                               const net::StreamState& initial,
                               const std::vector<Segment>& segments,
                               int blank) {
  net::WindowCache cache = net::forward_window(params, frames, initial);
  SegmentLoss sl = segment_loss(cache, segments, blank);
  WindowGradient out;
  out.loss_sum = sl.loss_sum;
  out.label_count = sl.label_count;
  out.segments_used = sl.used;
  out.segments_infeasible = sl.infeasible;
  if (sl.label_count > 0) {
    out.grads = net::backward_window(params, cache, sl.dlogits);
  }
  return out;
}

double utterance_loss(const net::NetworkParams& params,
                      const net::NetworkConfig& config, const Utterance& utt,
                      int blank) {
  net::StreamState state = net::StreamState::zero(config);
  net::WindowCache cache = net::forward_window(params, utt.frames, state);
  ctc::LossAndGrad lg = ctc::loss_and_grad(cache.logits, utt.labels, blank);
  return lg.loss /
         static_cast<double>(std::max<std::size_t>(1, utt.labels.size()));
}

namespace {

// Endless stream: utterances drawn uniformly at random, frames concatenated,
// one labeled segment per utterance. The word-boundary label is attributed
// to the end of the preceding transcript unless it already ends with one.
class StreamAssembler {
 public:
  StreamAssembler(const std::vector<Utterance>& corpus, int boundary,
                  bool insert_boundary, Rng rng)
      : corpus_(corpus),
        boundary_(boundary),
        insert_boundary_(insert_boundary),
        rng_(std::move(rng)) {}

  struct StreamSegment {
    long start = 0;
    long end = 0;
    bool consumed = false;
    LabelSequence labels;
  };

  // Extends the stream until at least `upto` frames exist.
  void fill_to(long upto) {
    while (next_frame_ < upto) {
      const Utterance& utt =
          corpus_[static_cast<std::size_t>(rng_.uniform_index(corpus_.size()))];
      StreamSegment seg;
      seg.start = next_frame_;
      seg.end = next_frame_ + static_cast<long>(utt.frames.size());
      seg.labels = utt.labels;
      if (insert_boundary_ &&
          (seg.labels.empty() || seg.labels.back() != boundary_)) {
        seg.labels.push_back(boundary_);
      }
      next_frame_ = seg.end;
      segments_.push_back(std::move(seg));
      for (const net::Vec& f : utt.frames) frames_.push_back(&f);
    }
  }

  const net::Vec& frame(long index) const {
    return *frames_[static_cast<std::size_t>(index - base_)];
  }

  std::deque<StreamSegment>& segments() { return segments_; }

  // Drops frames and obsolete segments before `offset`; returns how many
  // dropped segments never got trained (too long for any window).
  int trim(long offset) {
    while (base_ < offset && !frames_.empty()) {
      frames_.pop_front();
      ++base_;
    }
    int dropped_unconsumed = 0;
    while (!segments_.empty() && segments_.front().start < offset) {
      if (!segments_.front().consumed) ++dropped_unconsumed;
      segments_.pop_front();
    }
    return dropped_unconsumed;
  }

 private:
  const std::vector<Utterance>& corpus_;
  int boundary_;
  bool insert_boundary_;
  Rng rng_;
  std::deque<const net::Vec*> frames_;
  std::deque<StreamSegment> segments_;
  long next_frame_ = 0;
  long base_ = 0;
};

double validation_loss(const net::NetworkParams& params,
                       const net::NetworkConfig& config,
                       const std::vector<Utterance>& validation, int blank) {
  double loss = 0.0;
  long labels = 0;
  for (const Utterance& utt : validation) {
    net::StreamState state = net::StreamState::zero(config);
    net::WindowCache cache = net::forward_window(params, utt.frames, state);
    try {
      loss += ctc::loss_and_grad(cache.logits, utt.labels, blank).loss;
      labels += static_cast<long>(utt.labels.size());
    } catch (const InvalidArgument&) {
      // infeasible validation utterance; ignore
    }
  }
  return labels > 0 ? loss / static_cast<double>(labels) : 0.0;
}

}  // namespace

TrainResult train_stream(const net::NetworkConfig& config,
                         net::NetworkParams initial,
                         const std::vector<Utterance>& corpus,
                         const std::vector<Utterance>& validation,
                         int blank, int boundary,
                         const TrainOptions& options) {
  config.validate();
  if (corpus.empty()) throw InvalidArgument("train: empty corpus");
  for (const Utterance& utt : corpus) {
    if (utt.frames.empty()) {
      throw InvalidArgument("train: utterance without frames: " + utt.id);
    }
    if (static_cast<int>(utt.frames[0].size()) != config.input_dim) {
      throw DataError("train: utterance dimension does not match input_dim: " +
                      utt.id);
    }
  }

  TrainResult result;
  result.params = std::move(initial);
  net::NetworkParams velocity = net::NetworkParams::zeros(config);

  const int W = config.unroll_length;
  const int U = config.update_period;
  double lr = config.learning_rate;

  StreamAssembler stream(corpus, boundary, options.insert_boundary,
                         Rng(options.stream_seed));
  net::StreamState window_state = net::StreamState::zero(config);
  long window_start = 0;
  double best_val = std::numeric_limits<double>::infinity();

  std::vector<net::Vec> window(static_cast<std::size_t>(W));
  while (result.updates < options.max_updates) {
    stream.fill_to(window_start + W);
    for (int t = 0; t < W; ++t) window[t] = stream.frame(window_start + t);

    // segments fully inside this window train exactly once
    std::vector<Segment> due;
    for (auto& seg : stream.segments()) {
      if (seg.consumed) continue;
      if (seg.start >= window_start && seg.end <= window_start + W) {
        due.push_back({static_cast<int>(seg.start - window_start),
                       static_cast<int>(seg.end - window_start), seg.labels});
        seg.consumed = true;
      }
    }

    if (due.empty()) {
      // nothing to train here; advance the carried state over one period
      for (int t = 0; t < U; ++t) {
        net::Vec x = window[t];
        for (std::size_t l = 0; l < result.params.layers.size(); ++l) {
          net::LayerState ns =
              net::lstm_step(result.params.layers[l], x, window_state.layers[l]);
          x = ns.h;
          window_state.layers[l] = std::move(ns);
        }
      }
    } else {
      net::WindowCache cache =
          net::forward_window(result.params, window, window_state);
      SegmentLoss sl = segment_loss(cache, due, blank);
      result.segments_trained += sl.used;
      result.segments_skipped += sl.infeasible;
      // the state carried forward reflects the pre-update weights that
      // actually produced this window
      net::StreamState next_state = cache.state_after(U - 1);

      if (sl.label_count > 0) {
        const double loss = sl.loss_sum / static_cast<double>(sl.label_count);
        if (!std::isfinite(loss)) {
          throw DivergenceError("train: non-finite loss at update " +
                                std::to_string(result.updates + 1));
        }
        net::NetworkParams grads =
            net::backward_window(result.params, cache, sl.dlogits);
        const double norm = std::sqrt(grads.squared_norm());
        if (!std::isfinite(norm)) {
          throw DivergenceError("train: non-finite gradient at update " +
                                std::to_string(result.updates + 1));
        }
        if (config.grad_clip > 0.0 && norm > config.grad_clip) {
          grads.scale(config.grad_clip / norm);
        }
        velocity.scale(config.momentum);
        velocity.add_scaled(grads, -lr);
        result.params.add_scaled(velocity, 1.0);
        if (!result.params.all_finite()) {
          throw DivergenceError("train: non-finite parameters at update " +
                                std::to_string(result.updates + 1));
        }

        ++result.updates;
        LossPoint point{result.updates, loss, lr, sl.used};
        result.loss_log.push_back(point);
        if (options.on_update) options.on_update(point);

        if (options.anneal_interval > 0 && !validation.empty() &&
            result.updates % options.anneal_interval == 0) {
          const double val =
              validation_loss(result.params, config, validation, blank);
          if (val < best_val - options.min_improvement) {
            best_val = val;
          } else {
            lr *= options.anneal_factor;
            ++result.anneals;
            if (result.anneals >= options.max_anneals) {
              result.early_stopped = true;
            }
          }
        }
      }
      window_state = std::move(next_state);
    }

    window_start += U;
    result.frames_consumed = window_start;
    result.segments_skipped += stream.trim(window_start);
    if (result.early_stopped) break;
  }

  return result;
}

}  // namespace train
}  // namespace ctcspot
