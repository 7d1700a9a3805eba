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

#ifndef CTCSPOT_CTC_HPP
#define CTCSPOT_CTC_HPP

#include <Eigen/Dense>
#include <vector>

#include "alphabet.hpp"

namespace ctcspot {
namespace ctc {

// Blank-interleaved CTC state sequence (-, l1, -, l2, ..., lL, -).
std::vector<int> expand_with_blanks(const LabelSequence& seq, int blank);

// Merge adjacent repeats, then delete blanks.
LabelSequence collapse_path(const std::vector<int>& framewise, int blank);

// Log-probability that the framewise posteriors emit a path collapsing to
// `seq`. `posteriors` is T x K, rows normalized. Forward recursion in the
// log domain; returns -inf when no valid path exists (e.g. T too short).
double log_likelihood(const Eigen::MatrixXd& posteriors,
                      const LabelSequence& seq, int blank);

struct LossAndGrad {
  double loss = 0.0;            // -log likelihood
  Eigen::MatrixXd grad_logits;  // T x K, d loss / d pre-softmax activations
};

// CTC loss and its gradient with respect to pre-softmax activations,
// grad[t][k] = y[t][k] - occupancy[t][k] / Z, via forward-backward.
// Throws InvalidArgument when the target is infeasible for T frames.
LossAndGrad loss_and_grad(const Eigen::MatrixXd& logits,
                          const LabelSequence& seq, int blank);

// Row-wise stable softmax (shared by the network head and the CTC loss).
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Exhaustive sum over all |K|^T framewise paths whose collapse equals `seq`.
// Test oracle; guarded to T <= 10 and K <= 6. Returns a plain probability.
double enumerate_paths_oracle(const Eigen::MatrixXd& posteriors,
                              const LabelSequence& seq, int blank);

// Number of framewise paths collapsing to `seq`, same guard as the oracle.
long count_paths_oracle(int frames, int alphabet_size,
                        const LabelSequence& seq, int blank);

}  // namespace ctc
}  // namespace ctcspot

#endif  // CTCSPOT_CTC_HPP
