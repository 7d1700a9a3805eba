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

#include "model_io.hpp"

#include <fstream>

#include "io_util.hpp"

namespace ctcspot {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'C', 'S', 'P', 'O', 'T', '1'};

void put_f32_block(std::ostream& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    io::put_f32(out, static_cast<float>(data[i]));
  }
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("model: cannot write " + path);
  out.write(kMagic, 8);

  const net::NetworkConfig& cfg = model.config;
  io::put_u32(out, static_cast<std::uint32_t>(cfg.input_dim));
  io::put_u32(out, static_cast<std::uint32_t>(cfg.layer_sizes.size()));
  for (int s : cfg.layer_sizes) io::put_u32(out, static_cast<std::uint32_t>(s));
  io::put_u32(out, static_cast<std::uint32_t>(cfg.output_dim));
  io::put_u32(out, static_cast<std::uint32_t>(cfg.unroll_length));
  io::put_u32(out, static_cast<std::uint32_t>(cfg.update_period));
  io::put_f64(out, cfg.learning_rate);
  io::put_f64(out, cfg.momentum);
  io::put_f64(out, cfg.grad_clip);
  io::put_u64(out, cfg.seed);

  const Alphabet& alpha = model.alphabet;
  io::put_u32(out, static_cast<std::uint32_t>(alpha.size()));
  for (int i = 0; i < alpha.size(); ++i) out.put(alpha.label_char(i));
  io::put_u32(out, static_cast<std::uint32_t>(alpha.blank()));
  io::put_u32(out, static_cast<std::uint32_t>(alpha.boundary()));

  const auto& stats = model.stats;
  io::put_u32(out, static_cast<std::uint32_t>(stats.mean.size()));
  put_f32_block(out, stats.mean.data(), static_cast<std::size_t>(stats.mean.size()));
  put_f32_block(out, stats.std.data(), static_cast<std::size_t>(stats.std.size()));

  auto refs = net::tensor_refs(const_cast<net::NetworkParams&>(model.params));
  io::put_u32(out, static_cast<std::uint32_t>(refs.size()));
  for (const auto& ref : refs) {
    io::put_u32(out, static_cast<std::uint32_t>(ref.name.size()));
    out.write(ref.name.data(), static_cast<std::streamsize>(ref.name.size()));
    io::put_u32(out, static_cast<std::uint32_t>(ref.rows));
    io::put_u32(out, static_cast<std::uint32_t>(ref.cols));
    // tensors are stored row-major in the file; Eigen holds them col-major
    for (int r = 0; r < ref.rows; ++r) {
      for (int c = 0; c < ref.cols; ++c) {
        io::put_f32(out, static_cast<float>(ref.data[c * ref.rows + r]));
      }
    }
  }
  if (!out) throw DataError("model: write failed: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("model: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("model: bad magic (wrong file or version): " + path);
  }

  Model model;
  net::NetworkConfig& cfg = model.config;
  cfg.input_dim = static_cast<int>(io::get_u32(in, "config"));
  const std::uint32_t n_layers = io::get_u32(in, "config");
  if (n_layers == 0 || n_layers > 64) {
    throw DataError("model: implausible layer count: " + path);
  }
  cfg.layer_sizes.clear();
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    cfg.layer_sizes.push_back(static_cast<int>(io::get_u32(in, "config")));
  }
  cfg.output_dim = static_cast<int>(io::get_u32(in, "config"));
  cfg.unroll_length = static_cast<int>(io::get_u32(in, "config"));
  cfg.update_period = static_cast<int>(io::get_u32(in, "config"));
  cfg.learning_rate = io::get_f64(in, "config");
  cfg.momentum = io::get_f64(in, "config");
  cfg.grad_clip = io::get_f64(in, "config");
  cfg.seed = io::get_u64(in, "config");
  cfg.validate();

  const std::uint32_t n_labels = io::get_u32(in, "alphabet");
  if (n_labels == 0 || n_labels > 256) {
    throw DataError("model: implausible alphabet size: " + path);
  }
  std::vector<char> labels(n_labels);
  in.read(labels.data(), n_labels);
  if (!in) throw DataError("model: truncated alphabet: " + path);
  const int blank = static_cast<int>(io::get_u32(in, "alphabet"));
  const int boundary = static_cast<int>(io::get_u32(in, "alphabet"));
  model.alphabet = Alphabet(std::move(labels), blank, boundary);

  const std::uint32_t norm_dim = io::get_u32(in, "normalizer");
  model.stats.mean.resize(norm_dim);
  model.stats.std.resize(norm_dim);
  for (std::uint32_t i = 0; i < norm_dim; ++i) {
    model.stats.mean[i] = static_cast<double>(io::get_f32(in, "normalizer"));
  }
  for (std::uint32_t i = 0; i < norm_dim; ++i) {
    model.stats.std[i] = static_cast<double>(io::get_f32(in, "normalizer"));
  }

  model.params = net::NetworkParams::zeros(cfg);
  auto refs = net::tensor_refs(model.params);
  const std::uint32_t n_tensors = io::get_u32(in, "tensor table");
  if (n_tensors != refs.size()) {
    throw DataError("model: tensor table size mismatch: " + path);
  }
  for (auto& ref : refs) {
    const std::uint32_t name_len = io::get_u32(in, "tensor name");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw DataError("model: truncated tensor name: " + path);
    if (name != ref.name) {
      throw DataError("model: unexpected tensor '" + name + "' (wanted '" +
                      ref.name + "'): " + path);
    }
    const int rows = static_cast<int>(io::get_u32(in, name));
    const int cols = static_cast<int>(io::get_u32(in, name));
    if (rows != ref.rows || cols != ref.cols) {
      throw DataError("model: shape mismatch for tensor '" + name +
                      "': " + path);
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        ref.data[c * rows + r] = static_cast<double>(io::get_f32(in, name));
      }
    }
  }
  if (model.config.output_dim != model.alphabet.size()) {
    throw DataError("model: output dimension does not match alphabet: " +
                    path);
  }
  return model;
}

}  // namespace ctcspot
