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

#ifndef CTCSPOT_EVAL_HPP
#define CTCSPOT_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ctcspot {
namespace eval {

struct Detection {
  std::string keyword;
  long frame = 0;
  double score = 0.0;
};

struct GroundTruth {
  std::string keyword;
  long end_frame = 0;
};

struct MatchResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<long> latencies;  // event frame - truth end frame per match
};

// Greedy one-to-one matching in event order: each event takes the nearest
// unmatched truth occurrence of its keyword within +-window frames.
// Unmatched events count as false positives, unmatched truths as misses.
MatchResult match_detections(std::vector<Detection> events,
                             const std::vector<GroundTruth>& truth,
                             int window);

struct PRPoint {
  double threshold = 0.0;  // per-character threshold
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

double f1_score(double precision, double recall);

struct SweepResult {
  std::vector<PRPoint> points;
  double max_f1 = 0.0;
  double best_threshold = 0.0;
  std::vector<long> best_latencies;  // matched latencies at the best point
};

// Threshold sweep over per-character threshold values. For keyword k the
// detector fires where score > -threshold * len(k); counts pool over all
// keywords (micro-average). Truth rows for keywords absent from `scores`
// are ignored.
SweepResult pr_sweep(const std::map<std::string, std::vector<double>>& scores,
                     const std::vector<GroundTruth>& truth,
                     const std::vector<double>& per_char_thresholds,
                     int refractory, int match_window);

struct LatencyStats {
  int count = 0;
  double median_frames = 0.0;
  double mean_frames = 0.0;
  double max_frames = 0.0;
  double frame_period_ms = 10.0;

  double median_ms() const { return median_frames * frame_period_ms; }
  double mean_ms() const { return mean_frames * frame_period_ms; }
  double max_ms() const { return max_frames * frame_period_ms; }
};

// Empty optional when nothing matched.
std::optional<LatencyStats> latency_stats(const std::vector<long>& latencies,
                                          double frame_period_ms = 10.0);

// detections CSV: frame,time_seconds,keyword,score
void write_detections_csv(const std::string& path,
                          const std::vector<Detection>& events,
                          double frame_period_ms = 10.0);
std::vector<Detection> read_detections_csv(const std::string& path);

// PR CSV: threshold,precision,recall,f1
void write_pr_csv(const std::string& path, const std::vector<PRPoint>& points);

}  // namespace eval
}  // namespace ctcspot

#endif  // CTCSPOT_EVAL_HPP
