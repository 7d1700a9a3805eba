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

#include "net.hpp"

#include "ctc.hpp"

namespace ctcspot {
namespace net {

namespace {

Vec sigmoid(const Vec& v) {
  return (1.0 / (1.0 + (-v.array()).exp())).matrix();
}

Mat uniform_mat(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-0.1, 0.1);
  }
  return m;
}

Vec uniform_vec(Rng& rng, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-0.1, 0.1);
  return v;
}

LstmLayer layer_like(int cells, int inputs) {
  LstmLayer l;
  l.w_ix = Mat::Zero(cells, inputs);
  l.w_fx = Mat::Zero(cells, inputs);
  l.w_gx = Mat::Zero(cells, inputs);
  l.w_ox = Mat::Zero(cells, inputs);
  l.w_ih = Mat::Zero(cells, cells);
  l.w_fh = Mat::Zero(cells, cells);
  l.w_gh = Mat::Zero(cells, cells);
  l.w_oh = Mat::Zero(cells, cells);
  l.p_i = Vec::Zero(cells);
  l.p_f = Vec::Zero(cells);
  l.p_o = Vec::Zero(cells);
  l.b_i = Vec::Zero(cells);
  l.b_f = Vec::Zero(cells);
  l.b_g = Vec::Zero(cells);
  l.b_o = Vec::Zero(cells);
  return l;
}

}  // namespace

void NetworkConfig::validate() const {
  if (input_dim <= 0 || output_dim <= 0) {
    throw InvalidArgument("network config: dimensions must be positive");
  }
  if (layer_sizes.empty()) {
    throw InvalidArgument("network config: need at least one LSTM layer");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw InvalidArgument("network config: bad layer size");
  }
  if (unroll_length < 1 || update_period < 1 ||
      update_period > unroll_length) {
    throw InvalidArgument(
        "network config: need 1 <= update_period <= unroll_length");
  }
  if (!(learning_rate >= 0.0) || !(momentum >= 0.0) || momentum >= 1.0) {
    throw InvalidArgument("network config: bad learning rate or momentum");
  }
}

NetworkParams NetworkParams::init(const NetworkConfig& config, Rng& rng) {
  config.validate();
  NetworkParams p;
  int inputs = config.input_dim;
  for (int cells : config.layer_sizes) {
    LstmLayer l;
    l.w_ix = uniform_mat(rng, cells, inputs);
    l.w_fx = uniform_mat(rng, cells, inputs);
    l.w_gx = uniform_mat(rng, cells, inputs);
    l.w_ox = uniform_mat(rng, cells, inputs);
    l.w_ih = uniform_mat(rng, cells, cells);
    l.w_fh = uniform_mat(rng, cells, cells);
    l.w_gh = uniform_mat(rng, cells, cells);
    l.w_oh = uniform_mat(rng, cells, cells);
    l.p_i = uniform_vec(rng, cells);
    l.p_f = uniform_vec(rng, cells);
    l.p_o = uniform_vec(rng, cells);
    l.b_i = Vec::Zero(cells);
    l.b_f = Vec::Constant(cells, 1.0);  // keep early memories
    l.b_g = Vec::Zero(cells);
    l.b_o = Vec::Zero(cells);
    p.layers.push_back(std::move(l));
    inputs = cells;
  }
  p.w_out = uniform_mat(rng, config.output_dim, inputs);
  p.b_out = Vec::Zero(config.output_dim);
  return p;
}

NetworkParams NetworkParams::zeros(const NetworkConfig& config) {
  config.validate();
  NetworkParams p;
  int inputs = config.input_dim;
  for (int cells : config.layer_sizes) {
    p.layers.push_back(layer_like(cells, inputs));
    inputs = cells;
  }
  p.w_out = Mat::Zero(config.output_dim, inputs);
  p.b_out = Vec::Zero(config.output_dim);
  return p;
}

std::vector<TensorRef> tensor_refs(NetworkParams& params) {
  std::vector<TensorRef> refs;
  auto mat = [&refs](const std::string& name, Mat& m) {
    refs.push_back({name, m.data(), static_cast<int>(m.rows()),
                    static_cast<int>(m.cols())});
  };
  auto vec = [&refs](const std::string& name, Vec& v) {
    refs.push_back({name, v.data(), static_cast<int>(v.size()), 1});
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    LstmLayer& l = params.layers[i];
    const std::string base = "layer" + std::to_string(i) + ".";
    mat(base + "w_ix", l.w_ix);
    mat(base + "w_fx", l.w_fx);
    mat(base + "w_gx", l.w_gx);
    mat(base + "w_ox", l.w_ox);
    mat(base + "w_ih", l.w_ih);
    mat(base + "w_fh", l.w_fh);
    mat(base + "w_gh", l.w_gh);
    mat(base + "w_oh", l.w_oh);
    vec(base + "p_i", l.p_i);
    vec(base + "p_f", l.p_f);
    vec(base + "p_o", l.p_o);
    vec(base + "b_i", l.b_i);
    vec(base + "b_f", l.b_f);
    vec(base + "b_g", l.b_g);
    vec(base + "b_o", l.b_o);
  }
  mat("softmax.w", params.w_out);
  vec("softmax.b", params.b_out);
  return refs;
}

void NetworkParams::add_scaled(const NetworkParams& other, double s) {
  auto dst = tensor_refs(*this);
  auto src = tensor_refs(const_cast<NetworkParams&>(other));
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::size_t n =
        static_cast<std::size_t>(dst[i].rows) * dst[i].cols;
    for (std::size_t j = 0; j < n; ++j) dst[i].data[j] += s * src[i].data[j];
  }
}

void NetworkParams::scale(double s) {
  for (auto& ref : tensor_refs(*this)) {
    const std::size_t n = static_cast<std::size_t>(ref.rows) * ref.cols;
    for (std::size_t j = 0; j < n; ++j) ref.data[j] *= s;
  }
}

double NetworkParams::squared_norm() const {
  double acc = 0.0;
  for (auto& ref : tensor_refs(const_cast<NetworkParams&>(*this))) {
    const std::size_t n = static_cast<std::size_t>(ref.rows) * ref.cols;
    for (std::size_t j = 0; j < n; ++j) acc += ref.data[j] * ref.data[j];
  }
  return acc;
}

bool NetworkParams::all_finite() const {
  for (auto& ref : tensor_refs(const_cast<NetworkParams&>(*this))) {
    const std::size_t n = static_cast<std::size_t>(ref.rows) * ref.cols;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(ref.data[j])) return false;
    }
  }
  return true;
}

StreamState StreamState::zero(const NetworkConfig& config) {
  StreamState s;
  for (int cells : config.layer_sizes) {
    s.layers.push_back({Vec::Zero(cells), Vec::Zero(cells)});
  }
  return s;
}

LayerState lstm_step(const LstmLayer& layer, const Vec& x,
                     const LayerState& prev, StepCache* cache) {
  if (x.size() != layer.input_size()) {
    throw InvalidArgument("lstm_step: input dimension mismatch");
  }
  const Vec i = sigmoid(layer.w_ix * x + layer.w_ih * prev.h +
                        layer.p_i.cwiseProduct(prev.c) + layer.b_i);
  const Vec f = sigmoid(layer.w_fx * x + layer.w_fh * prev.h +
                        layer.p_f.cwiseProduct(prev.c) + layer.b_f);
  const Vec g =
      (layer.w_gx * x + layer.w_gh * prev.h + layer.b_g).array().tanh();
  const Vec c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  const Vec o = sigmoid(layer.w_ox * x + layer.w_oh * prev.h +
                        layer.p_o.cwiseProduct(c) + layer.b_o);
  const Vec tanh_c = c.array().tanh();
  LayerState next{o.cwiseProduct(tanh_c), c};
  if (cache) {
    cache->x = x;
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->i = i;
    cache->f = f;
    cache->g = g;
    cache->o = o;
    cache->c = c;
    cache->tanh_c = tanh_c;
    cache->h = next.h;
  }
  return next;
}

void lstm_step_backward(const LstmLayer& layer, const StepCache& cache,
                        const Vec& dh, const Vec& dc_carry, LstmLayer* grads,
                        Vec* dx, Vec* dh_prev, Vec* dc_prev) {
  const Vec d_ao = dh.cwiseProduct(cache.tanh_c)
                       .cwiseProduct(cache.o)
                       .cwiseProduct(Vec::Ones(cache.o.size()) - cache.o);
  Vec dc = dh.cwiseProduct(cache.o).cwiseProduct(
               (1.0 - cache.tanh_c.array().square()).matrix()) +
           dc_carry + d_ao.cwiseProduct(layer.p_o);
  const Vec d_ai = dc.cwiseProduct(cache.g)
                       .cwiseProduct(cache.i)
                       .cwiseProduct(Vec::Ones(cache.i.size()) - cache.i);
  const Vec d_af = dc.cwiseProduct(cache.c_prev)
                       .cwiseProduct(cache.f)
                       .cwiseProduct(Vec::Ones(cache.f.size()) - cache.f);
  const Vec d_ag = dc.cwiseProduct(cache.i).cwiseProduct(
      (1.0 - cache.g.array().square()).matrix());

  *dc_prev = dc.cwiseProduct(cache.f) + d_ai.cwiseProduct(layer.p_i) +
             d_af.cwiseProduct(layer.p_f);
  *dh_prev = layer.w_ih.transpose() * d_ai + layer.w_fh.transpose() * d_af +
             layer.w_gh.transpose() * d_ag + layer.w_oh.transpose() * d_ao;
  *dx = layer.w_ix.transpose() * d_ai + layer.w_fx.transpose() * d_af +
        layer.w_gx.transpose() * d_ag + layer.w_ox.transpose() * d_ao;

  grads->w_ix += d_ai * cache.x.transpose();
  grads->w_fx += d_af * cache.x.transpose();
  grads->w_gx += d_ag * cache.x.transpose();
  grads->w_ox += d_ao * cache.x.transpose();
  grads->w_ih += d_ai * cache.h_prev.transpose();
  grads->w_fh += d_af * cache.h_prev.transpose();
  grads->w_gh += d_ag * cache.h_prev.transpose();
  grads->w_oh += d_ao * cache.h_prev.transpose();
  grads->p_i += d_ai.cwiseProduct(cache.c_prev);
  grads->p_f += d_af.cwiseProduct(cache.c_prev);
  grads->p_o += d_ao.cwiseProduct(cache.c);
  grads->b_i += d_ai;
  grads->b_f += d_af;
  grads->b_g += d_ag;
  grads->b_o += d_ao;
}

Vec forward_frame(const NetworkParams& params, const Vec& frame,
                  StreamState* state) {
  Vec x = frame;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    LayerState next = lstm_step(params.layers[l], x, state->layers[l]);
    x = next.h;
    state->layers[l] = std::move(next);
  }
  const Vec logits = params.w_out * x + params.b_out;
  const double m = logits.maxCoeff();
  Eigen::ArrayXd e = (logits.array() - m).exp();
  return (e / e.sum()).matrix();
}

StreamState WindowCache::state_after(int t) const {
  StreamState s;
  for (const StepCache& step : steps[t]) {
    s.layers.push_back({step.h, step.c});
  }
  return s;
}

WindowCache forward_window(const NetworkParams& params,
                           std::span<const Vec> frames,
                           const StreamState& initial) {
  WindowCache cache;
  const int T = static_cast<int>(frames.size());
  const int L = static_cast<int>(params.layers.size());
  cache.steps.resize(T, std::vector<StepCache>(L));
  cache.logits.resize(T, params.b_out.size());
  StreamState state = initial;
  for (int t = 0; t < T; ++t) {
    Vec x = frames[t];
    for (int l = 0; l < L; ++l) {
      LayerState next =
          lstm_step(params.layers[l], x, state.layers[l], &cache.steps[t][l]);
      x = next.h;
      state.layers[l] = std::move(next);
    }
    cache.logits.row(t) = (params.w_out * x + params.b_out).transpose();
  }
  return cache;
}

NetworkParams backward_window(const NetworkParams& params,
                              const WindowCache& cache, const Mat& dlogits) {
  const int T = cache.frames();
  const int L = static_cast<int>(params.layers.size());
  if (dlogits.rows() != T || dlogits.cols() != params.b_out.size()) {
    throw InvalidArgument("backward_window: dlogits shape mismatch");
  }

  NetworkParams grads;
  {
    int inputs = L > 0 ? params.layers[0].input_size() : 0;
    for (int l = 0; l < L; ++l) {
      grads.layers.push_back(layer_like(params.layers[l].size(), inputs));
      inputs = params.layers[l].size();
    }
    grads.w_out = Mat::Zero(params.w_out.rows(), params.w_out.cols());
    grads.b_out = Vec::Zero(params.b_out.size());
  }

  // gradients flowing backward in time, per layer
  std::vector<Vec> dh_rec(L), dc_rec(L);
  for (int l = 0; l < L; ++l) {
    dh_rec[l] = Vec::Zero(params.layers[l].size());
    dc_rec[l] = Vec::Zero(params.layers[l].size());
  }

  for (int t = T - 1; t >= 0; --t) {
    const Vec dz = dlogits.row(t).transpose();
    grads.w_out += dz * cache.steps[t][L - 1].h.transpose();
    grads.b_out += dz;
    Vec dh_above = params.w_out.transpose() * dz;
    for (int l = L - 1; l >= 0; --l) {
      const Vec dh = dh_above + dh_rec[l];
      Vec dx, dh_prev, dc_prev;
      lstm_step_backward(params.layers[l], cache.steps[t][l], dh, dc_rec[l],
                         &grads.layers[l], &dx, &dh_prev, &dc_prev);
      dh_rec[l] = std::move(dh_prev);
      dc_rec[l] = std::move(dc_prev);
      dh_above = std::move(dx);  // feeds the layer below at the same frame
    }
  }
  return grads;
}

}  // namespace net
}  // namespace ctcspot
