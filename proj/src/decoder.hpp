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

#ifndef CTCSPOT_DECODER_HPP
#define CTCSPOT_DECODER_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alphabet.hpp"

namespace ctcspot {
namespace kws {

enum class Semantics { kSum, kMax };

// Chain of decoding nodes `_ c1 ... cn _`; every node holds a label state
// followed by a blank state. The detection threshold scales with the
// character count (boundary nodes excluded).
struct KeywordNetwork {
  std::string text;
  LabelSequence chars;            // the n character labels
  std::vector<int> node_labels;   // boundary, chars..., boundary
  double threshold = 0.0;         // per_char_threshold * n

  int num_nodes() const { return static_cast<int>(node_labels.size()); }
  int num_states() const { return 2 * num_nodes(); }
};

KeywordNetwork build_keyword_network(const std::string& keyword,
                                     const Alphabet& alphabet,
                                     double per_char_threshold);

// Explicit CTC-state transition structure shared by the decoders. State
// 2i is node i's label state, 2i+1 its blank state. A label state follows
// itself, the previous blank, and the previous label when the two labels
// differ; a blank state follows itself and its node's label state.
struct StateGraph {
  std::vector<int> labels;              // emission per state
  std::vector<std::vector<int>> preds;  // predecessor states
};

// Keyword-only model: the filler posterior is fixed to one, realized as a
// log-probability 0 injected into the entry boundary state every frame.
// The injection replaces the entry state's history (a self-loop there
// would re-count mass that re-enters at probability one anyway), which
// keeps every state value a genuine log path probability <= 0.
class KeywordOnlyDecoder {
 public:
  KeywordOnlyDecoder(KeywordNetwork network, const Alphabet& alphabet,
                     Semantics semantics);

  // Advances one frame; returns the keyword log-posterior, the combined
  // value of the terminal boundary node's two states.
  double step(const Eigen::VectorXd& posterior);
  void reset();

  const KeywordNetwork& network() const { return network_; }
  Semantics semantics() const { return semantics_; }
  long frames_seen() const { return frames_; }
  const std::vector<double>& state_values() const { return values_; }
  const StateGraph& graph() const { return graph_; }

 private:
  KeywordNetwork network_;
  Semantics semantics_;
  int alphabet_size_;
  StateGraph graph_;
  std::vector<double> values_;
  std::vector<double> scratch_;
  long frames_ = 0;
};

struct FillerOptions {
  // When false, keyword entries take a per-frame injected 1 instead of the
  // filler's exit values (isolates the keyword branch for testing).
  bool keyword_entry_from_filler = true;
};

// Joint keyword-filler network: one ergodic filler node per non-blank
// label (the word-boundary node included) plus any number of keyword
// chains entered from the filler. Combination is max everywhere, because
// paths merging from the filler carry different label histories and their
// probabilities cannot be summed. The detection statistic per keyword is
// keyword log-posterior minus filler log-posterior.
class KeywordFillerDecoder {
 public:
  KeywordFillerDecoder(std::vector<KeywordNetwork> networks,
                       const Alphabet& alphabet, FillerOptions options = {});

  struct StepResult {
    double filler = 0.0;               // log posterior of the filler model
    std::vector<double> keyword;       // per keyword, log posterior
    std::vector<double> statistic;     // keyword - filler (-inf safe)
  };

  StepResult step(const Eigen::VectorXd& posterior);
  void reset();

  int num_keywords() const { return static_cast<int>(networks_.size()); }
  const KeywordNetwork& network(int k) const { return networks_[k]; }
  long frames_seen() const { return frames_; }
  const std::vector<double>& state_values() const { return values_; }
  const StateGraph& graph() const { return graph_; }
  // [first, last) state ids of keyword k inside state_values()
  std::pair<int, int> keyword_state_range(int k) const;
  int filler_state_count() const { return 2 * filler_nodes_; }

 private:
  std::vector<KeywordNetwork> networks_;
  FillerOptions options_;
  int alphabet_size_;
  int filler_nodes_;
  StateGraph graph_;
  std::vector<int> keyword_first_state_;
  std::vector<int> entry_states_;
  std::vector<double> values_;
  std::vector<double> scratch_;
  bool started_ = false;
  long frames_ = 0;
};

// A detector event: the peak of one above-threshold score region.
struct DetectionEvent {
  int keyword = 0;
  long frame = 0;
  double score = 0.0;
};

// Turns a score stream into discrete events. A region starts when the
// score exceeds the threshold and ends once it has stayed at or below it
// for `refractory` consecutive frames; each region yields one event at its
// peak (earliest frame on ties). Short dips therefore merge into a single
// detection instead of re-firing.
class DetectionTracker {
 public:
  DetectionTracker(double threshold, int refractory);

  std::optional<DetectionEvent> feed(long frame, double score);
  std::optional<DetectionEvent> finish();
  void reset();

  double threshold() const { return threshold_; }

 private:
  double threshold_;
  int refractory_;
  bool in_region_ = false;
  int below_run_ = 0;
  DetectionEvent peak_;
};

// Offline convenience over a whole score stream.
std::vector<DetectionEvent> detect(std::span<const double> scores,
                                   double threshold, int refractory);

}  // namespace kws
}  // namespace ctcspot

#endif  // CTCSPOT_DECODER_HPP
