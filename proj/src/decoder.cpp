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

#include <cmath>

#include "common.hpp"

namespace ctcspot {
namespace kws {

namespace {

double combine(Semantics semantics, double a, double b) {
  return semantics == Semantics::kSum ? log_sum_exp(a, b) : std::max(a, b);
}

// log emission probabilities, clamped into [0, 1] first (float32 storage
// can nudge a softmax output past 1)
void log_emissions(const Eigen::VectorXd& posterior, std::vector<double>* out) {
  for (std::size_t k = 0; k < out->size(); ++k) {
    const double p = std::min(1.0, std::max(0.0, posterior[static_cast<int>(k)]));
    (*out)[k] = std::log(p);
  }
}

// Appends the expanded states of a node chain to the graph. States of node
// i land at base + 2i (label) and base + 2i + 1 (blank). The first node's
// label state gets no chain predecessors here; entry wiring is the
// caller's business.
int append_chain(StateGraph* graph, const std::vector<int>& node_labels,
                 int blank) {
  const int base = static_cast<int>(graph->labels.size());
  const int n = static_cast<int>(node_labels.size());
  for (int i = 0; i < n; ++i) {
    // label state
    graph->labels.push_back(node_labels[i]);
    std::vector<int> preds;
    if (i > 0) {
      preds.push_back(base + 2 * i);  // self (entry state handled by caller)
      preds.push_back(base + 2 * (i - 1) + 1);  // previous blank
      if (node_labels[i - 1] != node_labels[i]) {
        preds.push_back(base + 2 * (i - 1));  // skip over the blank
      }
    }
    graph->preds.push_back(std::move(preds));
    // blank state
    graph->labels.push_back(blank);
    graph->preds.push_back({base + 2 * i + 1, base + 2 * i});
  }
  return base;
}

}  // namespace

KeywordNetwork build_keyword_network(const std::string& keyword,
                                     const Alphabet& alphabet,
                                     double per_char_threshold) {
  KeywordNetwork net;
  net.chars = alphabet.encode_keyword(keyword);
  net.text = alphabet.decode(net.chars);
  net.node_labels.push_back(alphabet.boundary());
  for (int c : net.chars) net.node_labels.push_back(c);
  net.node_labels.push_back(alphabet.boundary());
  net.threshold = per_char_threshold * static_cast<double>(net.chars.size());
  return net;
}

KeywordOnlyDecoder::KeywordOnlyDecoder(KeywordNetwork network,
                                       const Alphabet& alphabet,
                                       Semantics semantics)
    : network_(std::move(network)),
      semantics_(semantics),
      alphabet_size_(alphabet.size()) {
  append_chain(&graph_, network_.node_labels, alphabet.blank());
  values_.assign(graph_.labels.size(), kLogZero);
  scratch_.resize(graph_.labels.size());
}

double KeywordOnlyDecoder::step(const Eigen::VectorXd& posterior) {
  if (posterior.size() != alphabet_size_) {
    throw InvalidArgument("decoder: posterior dimension mismatch");
  }
  std::vector<double> ly(static_cast<std::size_t>(alphabet_size_));
  log_emissions(posterior, &ly);

  const int S = static_cast<int>(graph_.labels.size());
  for (int s = 0; s < S; ++s) {
    double incoming = s == 0 ? 0.0 : kLogZero;  // entry re-enters at prob 1
    for (int p : graph_.preds[s]) {
      incoming = combine(semantics_, incoming, values_[p]);
    }
    scratch_[s] =
        incoming == kLogZero ? kLogZero : incoming + ly[graph_.labels[s]];
  }
  values_.swap(scratch_);
  ++frames_;
  const int S_label = S - 2;
  return combine(semantics_, values_[S_label], values_[S - 1]);
}

void KeywordOnlyDecoder::reset() {
  values_.assign(values_.size(), kLogZero);
  frames_ = 0;
}

KeywordFillerDecoder::KeywordFillerDecoder(std::vector<KeywordNetwork> networks,
                                           const Alphabet& alphabet,
                                           FillerOptions options)
    : networks_(std::move(networks)),
      options_(options),
      alphabet_size_(alphabet.size()) {
  if (networks_.empty()) {
    throw InvalidArgument("filler decoder: need at least one keyword");
  }
  const int blank = alphabet.blank();

  // Filler: one node per non-blank label (labels all distinct), every node
  // reachable from every other. Label -> label transitions skip the blank
  // and are allowed between different labels only; blank -> label is
  // always allowed, including back into the same label.
  std::vector<int> filler_labels;
  for (int k = 0; k < alphabet.size(); ++k) {
    if (k != blank) filler_labels.push_back(k);
  }
  filler_nodes_ = static_cast<int>(filler_labels.size());
  for (int i = 0; i < filler_nodes_; ++i) {
    graph_.labels.push_back(filler_labels[i]);
    graph_.preds.emplace_back();
    graph_.labels.push_back(blank);
    graph_.preds.push_back({2 * i + 1, 2 * i});
  }
  for (int i = 0; i < filler_nodes_; ++i) {
    auto& preds = graph_.preds[2 * i];
    preds.push_back(2 * i);  // self
    for (int j = 0; j < filler_nodes_; ++j) {
      if (j != i) preds.push_back(2 * j);
      preds.push_back(2 * j + 1);
    }
  }

  // keyword chains, entered from the filler
  for (auto& net : networks_) {
    const int base = append_chain(&graph_, net.node_labels, blank);
    keyword_first_state_.push_back(base);
    entry_states_.push_back(base);
    auto& entry_preds = graph_.preds[base];
    entry_preds.push_back(base);  // self
    if (options_.keyword_entry_from_filler) {
      const int entry_label = graph_.labels[base];
      for (int j = 0; j < filler_nodes_; ++j) {
        if (filler_labels[j] != entry_label) {
          entry_preds.push_back(2 * j);  // filler label -> keyword boundary
        }
        entry_preds.push_back(2 * j + 1);  // filler blank -> keyword boundary
      }
    }
  }

  values_.assign(graph_.labels.size(), kLogZero);
  scratch_.resize(graph_.labels.size());
}

std::pair<int, int> KeywordFillerDecoder::keyword_state_range(int k) const {
  const int first = keyword_first_state_[k];
  const int last = k + 1 < static_cast<int>(keyword_first_state_.size())
                       ? keyword_first_state_[k + 1]
                       : static_cast<int>(graph_.labels.size());
  return {first, last};
}

KeywordFillerDecoder::StepResult KeywordFillerDecoder::step(
    const Eigen::VectorXd& posterior) {
  if (posterior.size() != alphabet_size_) {
    throw InvalidArgument("decoder: posterior dimension mismatch");
  }
  std::vector<double> ly(static_cast<std::size_t>(alphabet_size_));
  log_emissions(posterior, &ly);

  const int S = static_cast<int>(graph_.labels.size());
  // the network starts at the first frame with any usable label mass: all
  // filler label states (and keyword entries) take an injected 1 until then
  const bool inject = !started_;
  for (int s = 0; s < S; ++s) {
    double incoming = kLogZero;
    for (int p : graph_.preds[s]) {
      incoming = std::max(incoming, values_[p]);
    }
    scratch_[s] =
        incoming == kLogZero ? kLogZero : incoming + ly[graph_.labels[s]];
  }
  if (inject) {
    for (int i = 0; i < filler_nodes_; ++i) {
      scratch_[2 * i] = std::max(scratch_[2 * i], ly[graph_.labels[2 * i]]);
    }
    for (int e : entry_states_) {
      scratch_[e] = std::max(scratch_[e], ly[graph_.labels[e]]);
    }
  }
  if (!options_.keyword_entry_from_filler) {
    // isolation mode: the entry behaves exactly like the keyword-only model
    for (int e : entry_states_) {
      scratch_[e] = ly[graph_.labels[e]];
    }
  }
  values_.swap(scratch_);
  ++frames_;

  StepResult result;
  result.filler = kLogZero;
  for (int s = 0; s < 2 * filler_nodes_; ++s) {
    result.filler = std::max(result.filler, values_[s]);
  }
  if (result.filler != kLogZero) started_ = true;
  for (int k = 0; k < num_keywords(); ++k) {
    auto [first, last] = keyword_state_range(k);
    const double kw = std::max(values_[last - 2], values_[last - 1]);
    result.keyword.push_back(kw);
    result.statistic.push_back(kw == kLogZero ? kLogZero
                                              : kw - result.filler);
  }
  return result;
}

void KeywordFillerDecoder::reset() {
  values_.assign(values_.size(), kLogZero);
  started_ = false;
  frames_ = 0;
}

DetectionTracker::DetectionTracker(double threshold, int refractory)
    : threshold_(threshold), refractory_(refractory) {
  if (refractory < 0) {
    throw InvalidArgument("detection tracker: refractory must be >= 0");
  }
}

std::optional<DetectionEvent> DetectionTracker::feed(long frame,
                                                     double score) {
  if (!in_region_) {
    if (score > threshold_) {
      in_region_ = true;
      below_run_ = 0;
      peak_ = {0, frame, score};
    }
    return std::nullopt;
  }
  if (score > threshold_) {
    below_run_ = 0;
    if (score > peak_.score) peak_ = {0, frame, score};
    return std::nullopt;
  }
  if (++below_run_ > refractory_) {
    in_region_ = false;
    below_run_ = 0;
    return peak_;
  }
  return std::nullopt;
}

std::optional<DetectionEvent> DetectionTracker::finish() {
  if (!in_region_) return std::nullopt;
  in_region_ = false;
  below_run_ = 0;
  return peak_;
}

void DetectionTracker::reset() {
  in_region_ = false;
  below_run_ = 0;
}

std::vector<DetectionEvent> detect(std::span<const double> scores,
                                   double threshold, int refractory) {
  if (!std::isfinite(threshold)) {
    throw InvalidArgument("detect: threshold must be finite");
  }
  DetectionTracker tracker(threshold, refractory);
  std::vector<DetectionEvent> events;
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (auto ev = tracker.feed(static_cast<long>(t), scores[t])) {
      events.push_back(*ev);
    }
  }
  if (auto ev = tracker.finish()) events.push_back(*ev);
  return events;
}

}  // namespace kws
}  // namespace ctcspot
