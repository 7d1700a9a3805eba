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

#include "ctc.hpp"

#include <cmath>

#include "common.hpp"

namespace ctcspot {
namespace ctc {

namespace {

// States are the expanded sequence (-, l1, -, ..., lL, -). A state s may be
// reached from s (self), s-1, and s-2 when s is a label state whose label
// differs from the label two states back (repeated labels must pass through
// the blank in between).
bool skip_allowed(const std::vector<int>& states, int s) {
  return (s % 2 == 1) && s >= 2 && states[s] != states[s - 2];
}

Eigen::MatrixXd log_posteriors(const Eigen::MatrixXd& posteriors) {
  return posteriors.array().log().matrix();
}

}  // namespace

std::vector<int> expand_with_blanks(const LabelSequence& seq, int blank) {
  std::vector<int> states;
  states.reserve(2 * seq.size() + 1);
  states.push_back(blank);
  for (int label : seq) {
    states.push_back(label);
    states.push_back(blank);
  }
  return states;
}

LabelSequence collapse_path(const std::vector<int>& framewise, int blank) {
  LabelSequence out;
  int prev = -1;
  for (int label : framewise) {
    if (label != prev && label != blank) out.push_back(label);
    prev = label;
  }
  return out;
}

static Eigen::MatrixXd forward_log(const Eigen::MatrixXd& ly,
                                   const std::vector<int>& states) {
  const int T = static_cast<int>(ly.rows());
  const int S = static_cast<int>(states.size());
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(T, S, kLogZero);
  alpha(0, 0) = ly(0, states[0]);
  if (S > 1) alpha(0, 1) = ly(0, states[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_sum_exp(acc, alpha(t - 1, s - 1));
      if (skip_allowed(states, s)) acc = log_sum_exp(acc, alpha(t - 1, s - 2));
      alpha(t, s) = acc == kLogZero ? kLogZero : acc + ly(t, states[s]);
    }
  }
  return alpha;
}

double log_likelihood(const Eigen::MatrixXd& posteriors,
                      const LabelSequence& seq, int blank) {
  if (posteriors.rows() < 1)
    throw InvalidArgument("ctc: need at least one frame");
  const std::vector<int> states = expand_with_blanks(seq, blank);
  const Eigen::MatrixXd ly = log_posteriors(posteriors);
  const Eigen::MatrixXd alpha = forward_log(ly, states);
  const int T = static_cast<int>(ly.rows());
  const int S = static_cast<int>(states.size());
  double total = alpha(T - 1, S - 1);
  if (S > 1) total = log_sum_exp(total, alpha(T - 1, S - 2));
  return total;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd y(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    Eigen::ArrayXd e = (logits.row(t).array() - m).exp();
    y.row(t) = (e / e.sum()).matrix();
  }
  return y;
}

LossAndGrad loss_and_grad(const Eigen::MatrixXd& logits,
                          const LabelSequence& seq, int blank) {
  const int T = static_cast<int>(logits.rows());
  const int K = static_cast<int>(logits.cols());
  if (T < 1) throw InvalidArgument("ctc: need at least one frame");

  const Eigen::MatrixXd y = softmax_rows(logits);
  const Eigen::MatrixXd ly = y.array().log().matrix();
  const std::vector<int> states = expand_with_blanks(seq, blank);
  const int S = static_cast<int>(states.size());

  const Eigen::MatrixXd alpha = forward_log(ly, states);
  double log_z = alpha(T - 1, S - 1);
  if (S > 1) log_z = log_sum_exp(log_z, alpha(T - 1, S - 2));
  if (log_z == kLogZero) {
    throw InvalidArgument(
        "ctc: target sequence infeasible for the given frame count");
  }

  // beta(t, s): log sum over path suffixes leaving state s after frame t,
  // covering emissions at frames t+1..T-1. alpha + beta then covers every
  // frame exactly once, so exp(alpha + beta - log_z) is the occupancy.
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(T, S, kLogZero);
  beta(T - 1, S - 1) = 0.0;
  if (S > 1) beta(T - 1, S - 2) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double acc = beta(t + 1, s) == kLogZero
                       ? kLogZero
                       : beta(t + 1, s) + ly(t + 1, states[s]);
      if (s + 1 < S && beta(t + 1, s + 1) != kLogZero) {
        acc = log_sum_exp(acc, beta(t + 1, s + 1) + ly(t + 1, states[s + 1]));
      }
      if (s + 2 < S && skip_allowed(states, s + 2) &&
          beta(t + 1, s + 2) != kLogZero) {
        acc = log_sum_exp(acc, beta(t + 1, s + 2) + ly(t + 1, states[s + 2]));
      }
      beta(t, s) = acc;
    }
  }

  LossAndGrad out;
  out.loss = -log_z;
  out.grad_logits = y;
  for (int t = 0; t < T; ++t) {
    // log occupancy per label at frame t
    Eigen::ArrayXd occ = Eigen::ArrayXd::Constant(K, kLogZero);
    for (int s = 0; s < S; ++s) {
      const double v = alpha(t, s) + beta(t, s);
      if (v != kLogZero && !std::isnan(v)) {
        occ[states[s]] = log_sum_exp(occ[states[s]], v);
      }
    }
    for (int k = 0; k < K; ++k) {
      if (occ[k] != kLogZero) {
        out.grad_logits(t, k) -= std::exp(occ[k] - log_z);
      }
    }
  }
  return out;
}

namespace {

void check_oracle_guard(int frames, int alphabet_size) {
  if (frames > 10 || alphabet_size > 6) {
    throw InvalidArgument(
        "ctc oracle: guarded to T <= 10 and alphabet size <= 6");
  }
}

}  // namespace

double enumerate_paths_oracle(const Eigen::MatrixXd& posteriors,
                              const LabelSequence& seq, int blank) {
  const int T = static_cast<int>(posteriors.rows());
  const int K = static_cast<int>(posteriors.cols());
  check_oracle_guard(T, K);
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    if (collapse_path(path, blank) == seq) {
      double p = 1.0;
      for (int t = 0; t < T; ++t) p *= posteriors(t, path[t]);
      total += p;
    }
    // odometer increment over the K^T path space
    int pos = T - 1;
    while (pos >= 0 && ++path[pos] == K) path[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

long count_paths_oracle(int frames, int alphabet_size,
                        const LabelSequence& seq, int blank) {
  check_oracle_guard(frames, alphabet_size);
  std::vector<int> path(frames, 0);
  long count = 0;
  while (true) {
    if (collapse_path(path, blank) == seq) ++count;
    int pos = frames - 1;
    while (pos >= 0 && ++path[pos] == alphabet_size) path[pos--] = 0;
    if (pos < 0) break;
  }
  return count;
}

}  // namespace ctc
}  // namespace ctcspot
