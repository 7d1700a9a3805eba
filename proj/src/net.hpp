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

#ifndef CTCSPOT_NET_HPP
#define CTCSPOT_NET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace ctcspot {
namespace net {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct NetworkConfig {
  int input_dim = 123;
  std::vector<int> layer_sizes = {32, 32, 32};
  int output_dim = 30;
  int unroll_length = 128;   // truncated-BPTT window
  int update_period = 64;    // frames between weight updates
  double learning_rate = 0.2;
  double momentum = 0.9;
  double grad_clip = 1.0;    // global L2 cap per update
  std::uint64_t seed = 1;

  void validate() const;
};

// One LSTM layer with forget gate and peephole connections. Also used as
// the gradient container (same shapes).
struct LstmLayer {
  Mat w_ix, w_fx, w_gx, w_ox;  // cell x input
  Mat w_ih, w_fh, w_gh, w_oh;  // cell x cell
  Vec p_i, p_f, p_o;           // peepholes
  Vec b_i, b_f, b_g, b_o;

  int size() const { return static_cast<int>(b_i.size()); }
  int input_size() const { return static_cast<int>(w_ix.cols()); }
};

struct NetworkParams {
  std::vector<LstmLayer> layers;
  Mat w_out;  // output_dim x top layer size
  Vec b_out;

  // Uniform(-0.1, 0.1) weights, zero biases except forget bias +1.
  static NetworkParams init(const NetworkConfig& config, Rng& rng);
  static NetworkParams zeros(const NetworkConfig& config);

  void add_scaled(const NetworkParams& other, double s);
  void scale(double s);
  double squared_norm() const;
  bool all_finite() const;
};

// Named view over every tensor, in a stable order (drives serialization,
// SGD updates and finite-difference sweeps).
struct TensorRef {
  std::string name;
  double* data;
  int rows;
  int cols;  // 1 for vectors
};
std::vector<TensorRef> tensor_refs(NetworkParams& params);

struct LayerState {
  Vec h, c;
};

struct StreamState {
  std::vector<LayerState> layers;

  static StreamState zero(const NetworkConfig& config);
};

// Per-step values kept for backpropagation.
struct StepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, g, o, c, tanh_c, h;
};

// One LSTM step; fills `cache` when provided.
LayerState lstm_step(const LstmLayer& layer, const Vec& x,
                     const LayerState& prev, StepCache* cache = nullptr);

// Backward through one step. dh/dc_carry are gradients w.r.t. this step's
// outputs; emits gradients w.r.t. the inputs and accumulates into `grads`.
void lstm_step_backward(const LstmLayer& layer, const StepCache& cache,
                        const Vec& dh, const Vec& dc_carry, LstmLayer* grads,
                        Vec* dx, Vec* dh_prev, Vec* dc_prev);

// Full stack for one frame: LSTM layers then softmax. Updates `state`.
Vec forward_frame(const NetworkParams& params, const Vec& frame,
                  StreamState* state);

struct WindowCache {
  std::vector<std::vector<StepCache>> steps;  // [t][layer]
  Mat logits;                                 // T x output_dim

  int frames() const { return static_cast<int>(steps.size()); }
  // Recurrent state after frame t (h, c of every layer).
  StreamState state_after(int t) const;
};

// Unrolled forward over `frames` from `initial`, caching activations.
WindowCache forward_window(const NetworkParams& params,
                           std::span<const Vec> frames,
                           const StreamState& initial);

// Backprop d loss / d logits through the cached window; truncates at the
// window start. Returns parameter gradients (accumulated over all frames).
NetworkParams backward_window(const NetworkParams& params,
                              const WindowCache& cache, const Mat& dlogits);

}  // namespace net
}  // namespace ctcspot

#endif  // CTCSPOT_NET_HPP
