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

#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "decoder.hpp"

namespace ctcspot {
namespace eval {

MatchResult match_detections(std::vector<Detection> events,
                             const std::vector<GroundTruth>& truth,
                             int window) {
  std::sort(events.begin(), events.end(),
            [](const Detection& a, const Detection& b) {
              return a.frame < b.frame;
            });
  std::vector<bool> taken(truth.size(), false);
  MatchResult result;
  for (const Detection& ev : events) {
    long best_dist = static_cast<long>(window) + 1;
    std::size_t best = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (taken[i] || truth[i].keyword != ev.keyword) continue;
      const long dist = std::labs(ev.frame - truth[i].end_frame);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best < truth.size()) {
      taken[best] = true;
      ++result.tp;
      result.latencies.push_back(ev.frame - truth[best].end_frame);
    } else {
      ++result.fp;
    }
  }
  result.fn = static_cast<int>(truth.size()) - result.tp;
  return result;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

SweepResult pr_sweep(const std::map<std::string, std::vector<double>>& scores,
                     const std::vector<GroundTruth>& truth,
                     const std::vector<double>& per_char_thresholds,
                     int refractory, int match_window) {
  if (per_char_thresholds.empty()) {
    throw InvalidArgument("pr_sweep: need at least one threshold");
  }
  std::vector<GroundTruth> relevant;
  for (const auto& row : truth) {
    if (scores.count(row.keyword)) relevant.push_back(row);
  }

  SweepResult result;
  result.max_f1 = -1.0;
  for (double theta : per_char_thresholds) {
    std::vector<Detection> events;
    for (const auto& [keyword, stream] : scores) {
      const double threshold =
          -theta * static_cast<double>(keyword.size());
      for (const auto& ev : kws::detect(stream, threshold, refractory)) {
        events.push_back({keyword, ev.frame, ev.score});
      }
    }
    MatchResult match = match_detections(events, relevant, match_window);
    PRPoint point;
    point.threshold = theta;
    point.tp = match.tp;
    point.fp = match.fp;
    point.fn = match.fn;
    point.precision =
        match.tp + match.fp > 0
            ? static_cast<double>(match.tp) / (match.tp + match.fp)
            : 1.0;  // no alarms -> no false alarms
    point.recall = match.tp + match.fn > 0
                       ? static_cast<double>(match.tp) / (match.tp + match.fn)
                       : 1.0;
    point.f1 = f1_score(point.precision, point.recall);
    if (point.f1 > result.max_f1) {
      result.max_f1 = point.f1;
      result.best_threshold = theta;
      result.best_latencies = match.latencies;
    }
    result.points.push_back(point);
  }
  return result;
}

std::optional<LatencyStats> latency_stats(const std::vector<long>& latencies,
                                          double frame_period_ms) {
  if (latencies.empty()) return std::nullopt;
  std::vector<long> sorted = latencies;
  std::sort(sorted.begin(), sorted.end());
  LatencyStats stats;
  stats.count = static_cast<int>(sorted.size());
  stats.frame_period_ms = frame_period_ms;
  const std::size_t n = sorted.size();
  stats.median_frames =
      n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                 : (static_cast<double>(sorted[n / 2 - 1]) +
                    static_cast<double>(sorted[n / 2])) /
                       2.0;
  double sum = 0.0;
  for (long v : sorted) sum += static_cast<double>(v);
  stats.mean_frames = sum / static_cast<double>(n);
  stats.max_frames = static_cast<double>(sorted.back());
  return stats;
}

void write_detections_csv(const std::string& path,
                          const std::vector<Detection>& events,
                          double frame_period_ms) {
  std::ofstream out(path);
  if (!out) throw DataError("detections: cannot write " + path);
  out << "frame,time_seconds,keyword,score\n";
  char buf[64];
  for (const auto& ev : events) {
    std::snprintf(buf, sizeof buf, "%.3f",
                  static_cast<double>(ev.frame) * frame_period_ms / 1000.0);
    out << ev.frame << ',' << buf << ',' << ev.keyword << ',';
    std::snprintf(buf, sizeof buf, "%.6f", ev.score);
    out << buf << '\n';
  }
  if (!out) throw DataError("detections: write failed: " + path);
}

std::vector<Detection> read_detections_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("detections: cannot open " + path);
  std::vector<Detection> events;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string frame, time, keyword, score;
    if (!std::getline(fields, frame, ',') || !std::getline(fields, time, ',') ||
        !std::getline(fields, keyword, ',') || !std::getline(fields, score)) {
      throw DataError("detections: malformed row: " + line);
    }
    events.push_back({keyword, std::stol(frame), std::stod(score)});
  }
  return events;
}

void write_pr_csv(const std::string& path,
                  const std::vector<PRPoint>& points) {
  std::ofstream out(path);
  if (!out) throw DataError("pr: cannot write " + path);
  out << "threshold,precision,recall,f1\n";
  char buf[128];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f", p.threshold,
                  p.precision, p.recall, p.f1);
    out << buf << '\n';
  }
}

}  // namespace eval
}  // namespace ctcspot
