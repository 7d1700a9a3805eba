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

#ifndef CTCSPOT_STREAM_FILE_HPP
#define CTCSPOT_STREAM_FILE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace ctcspot {

// Frame stream container: header (magic "KWSTRM1", kind, dim, frame period
// in ms) followed by frames as 32-bit little-endian floats, row per frame.
// The frame count is implied by the payload size.
enum class StreamKind : std::uint32_t {
  kFeatures = 0,
  kPosteriors = 1,
  kScores = 2,
};

const char* stream_kind_name(StreamKind kind);

class StreamWriter {
 public:
  StreamWriter(const std::string& path, StreamKind kind, int dim,
               double frame_period_ms);
  void write_frame(const Eigen::VectorXd& frame);
  void write_frame(const std::vector<double>& frame);
  void close();
  ~StreamWriter();

  StreamWriter(const StreamWriter&) = delete;
  StreamWriter& operator=(const StreamWriter&) = delete;

 private:
  void write_raw(const double* values, std::size_t count);

  std::ofstream out_;
  std::string path_;
  int dim_;
};

class StreamReader {
 public:
  explicit StreamReader(const std::string& path);

  StreamKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double frame_period_ms() const { return frame_period_ms_; }
  std::int64_t frame_count() const { return frame_count_; }

  // Reads up to max_frames frames; returns the number actually read.
  std::size_t read_frames(std::size_t max_frames,
                          std::vector<Eigen::VectorXd>* out);
  // Convenience: the remaining frames in one go.
  std::vector<Eigen::VectorXd> read_all();

 private:
  std::ifstream in_;
  std::string path_;
  StreamKind kind_ = StreamKind::kFeatures;
  int dim_ = 0;
  double frame_period_ms_ = 0.0;
  std::int64_t frame_count_ = 0;
  std::int64_t frames_read_ = 0;
};

}  // namespace ctcspot

#endif  // CTCSPOT_STREAM_FILE_HPP
