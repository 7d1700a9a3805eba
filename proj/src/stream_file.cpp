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

#include "stream_file.hpp"

#include <cstring>

#include "common.hpp"

namespace ctcspot {

namespace {

constexpr char kMagic[8] = {'K', 'W', 'S', 'T', 'R', 'M', '1', '\0'};
constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 4;

static_assert(sizeof(float) == 4);

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError("stream file truncated: " + path);
  return static_cast<std::uint32_t>(b[0]) | (b[1] << 8) | (b[2] << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint32_t float_bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

float bits_float(std::uint32_t u) {
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

const char* stream_kind_name(StreamKind kind) {
  switch (kind) {
    case StreamKind::kFeatures:
      return "features";
    case StreamKind::kPosteriors:
      return "posteriors";
    case StreamKind::kScores:
      return "scores";
  }
  return "unknown";
}

StreamWriter::StreamWriter(const std::string& path, StreamKind kind, int dim,
                           double frame_period_ms)
    : out_(path, std::ios::binary), path_(path), dim_(dim) {
  if (dim <= 0) throw InvalidArgument("stream file: dim must be positive");
  if (!out_) throw DataError("stream file: cannot write " + path);
  out_.write(kMagic, 8);
  put_u32(out_, static_cast<std::uint32_t>(kind));
  put_u32(out_, static_cast<std::uint32_t>(dim));
  put_u32(out_, float_bits(static_cast<float>(frame_period_ms)));
}

void StreamWriter::write_raw(const double* values, std::size_t count) {
  if (count != static_cast<std::size_t>(dim_)) {
    throw InvalidArgument("stream file: frame dimension mismatch");
  }
  std::vector<unsigned char> buf(count * 4);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t u = float_bits(static_cast<float>(values[i]));
    buf[4 * i] = static_cast<unsigned char>(u & 0xff);
    buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
    buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
  }
  out_.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size()));
  if (!out_) throw DataError("stream file: write failed: " + path_);
}

void StreamWriter::write_frame(const Eigen::VectorXd& frame) {
  write_raw(frame.data(), static_cast<std::size_t>(frame.size()));
}

void StreamWriter::write_frame(const std::vector<double>& frame) {
  write_raw(frame.data(), frame.size());
}

void StreamWriter::close() {
  if (out_.is_open()) {
    out_.close();
    if (!out_) throw DataError("stream file: close failed: " + path_);
  }
}

StreamWriter::~StreamWriter() {
  if (out_.is_open()) out_.close();
}

StreamReader::StreamReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw DataError("stream file: cannot open " + path);
  char magic[8];
  in_.read(magic, 8);
  if (!in_ || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("stream file: bad magic in " + path);
  }
  const std::uint32_t kind = get_u32(in_, path_);
  if (kind > 2) throw DataError("stream file: unknown kind in " + path);
  kind_ = static_cast<StreamKind>(kind);
  dim_ = static_cast<int>(get_u32(in_, path_));
  if (dim_ <= 0 || dim_ > 1 << 20) {
    throw DataError("stream file: implausible dimension in " + path);
  }
  frame_period_ms_ = static_cast<double>(bits_float(get_u32(in_, path_)));

  in_.seekg(0, std::ios::end);
  const std::int64_t payload =
      static_cast<std::int64_t>(in_.tellg()) - kHeaderBytes;
  in_.seekg(kHeaderBytes, std::ios::beg);
  if (payload < 0 || payload % (4 * dim_) != 0) {
    throw DataError("stream file: payload is not a whole number of frames: " +
                    path);
  }
  frame_count_ = payload / (4 * dim_);
}

std::size_t StreamReader::read_frames(std::size_t max_frames,
                                      std::vector<Eigen::VectorXd>* out) {
  std::size_t produced = 0;
  std::vector<unsigned char> buf(4 * static_cast<std::size_t>(dim_));
  while (produced < max_frames && frames_read_ < frame_count_) {
    in_.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size()));
    if (!in_) throw DataError("stream file: truncated read: " + path_);
    Eigen::VectorXd frame(dim_);
    for (int i = 0; i < dim_; ++i) {
      const std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i]) |
                              (buf[4 * i + 1] << 8) | (buf[4 * i + 2] << 16) |
                              (static_cast<std::uint32_t>(buf[4 * i + 3])
                               << 24);
      frame[i] = static_cast<double>(bits_float(u));
    }
    out->push_back(std::move(frame));
    ++frames_read_;
    ++produced;
  }
  return produced;
}

std::vector<Eigen::VectorXd> StreamReader::read_all() {
  std::vector<Eigen::VectorXd> frames;
  frames.reserve(static_cast<std::size_t>(frame_count_ - frames_read_));
  read_frames(static_cast<std::size_t>(frame_count_ - frames_read_), &frames);
  return frames;
}

}  // namespace ctcspot
