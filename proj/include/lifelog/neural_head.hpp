/* Copyright (c) 2026 The Lifelog Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "lifelog/error.hpp"
#include "lifelog/random.hpp"

namespace lifelog {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace detail {

inline void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::shape_mismatch, std::string(what) + ": expected dimension " +
                                               std::to_string(want) + ", got " + std::to_string(got));
  }
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

inline Vec sigmoid(const Vec& v) {
  return v.unaryExpr([](double a) { return sigmoid(a); });
}

inline Mat glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-r, r);
  }
  return m;
}

}  // namespace detail

// y = W x + b
struct DenseLayer {
  Mat weight;
  Vec bias;

  static DenseLayer zeros(Eigen::Index in_dim, Eigen::Index out_dim) {
    return {Mat::Zero(out_dim, in_dim), Vec::Zero(out_dim)};
  }

  // Biases start at zero.
  static DenseLayer random(Eigen::Index in_dim, Eigen::Index out_dim, Rng& rng) {
    return {detail::glorot_uniform(out_dim, in_dim, rng), Vec::Zero(out_dim)};
  }

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }

  Vec forward(const Vec& x) const {
    detail::require_size(x.size(), in_dim(), "dense layer input");
    return weight * x + bias;
  }

  // Accumulates parameter gradients for one input and returns dL/dx.
  Vec backward(const Vec& x, const Vec& dy, DenseLayer& grad) const {
    grad.weight.noalias() += dy * x.transpose();
    grad.bias += dy;
    return weight.transpose() * dy;
  }

  template <class F, class... Layers>
  static void visit(const std::string& prefix, F&& f, Layers&... layers) {
    f(prefix + ".weight", layers.weight...);
    f(prefix + ".bias", layers.bias...);
  }
};

// Coupled-gate LSTM cell with full-matrix peepholes:
//   i = sigmoid(Wxi x + Whi h' + Wci c' + bi)
//   c = (1 - i) * c' + i * tanh(Wxc x + Whc h' + bc)
//   o = sigmoid(Wxo x + Who h' + Wco c + bo)
//   h = o * tanh(c)
// There is no separate forget gate.
struct LstmCellParams {
  Mat w_x_input, w_h_input, w_c_input;
  Vec b_input;
  Mat w_x_cand, w_h_cand;
  Vec b_cand;
  Mat w_x_output, w_h_output, w_c_output;
  Vec b_output;

  Eigen::Index input_dim() const { return w_x_input.cols(); }
  Eigen::Index hidden_dim() const { return w_x_input.rows(); }

  static LstmCellParams zeros(Eigen::Index input_dim, Eigen::Index hidden_dim) {
    const auto dx = input_dim, dh = hidden_dim;
    return {Mat::Zero(dh, dx), Mat::Zero(dh, dh), Mat::Zero(dh, dh), Vec::Zero(dh),
            Mat::Zero(dh, dx), Mat::Zero(dh, dh), Vec::Zero(dh),
            Mat::Zero(dh, dx), Mat::Zero(dh, dh), Mat::Zero(dh, dh), Vec::Zero(dh)};
  }

  static LstmCellParams random(Eigen::Index input_dim, Eigen::Index hidden_dim, Rng& rng) {
    auto p = zeros(input_dim, hidden_dim);
    visit("", [&](const std::string&, auto& t) {
      if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Mat>) {
        t = detail::glorot_uniform(t.rows(), t.cols(), rng);
      }
    }, p);
    return p;
  }

  void validate() const {
    const auto dx = input_dim(), dh = hidden_dim();
    auto check = [&](const Mat& m, Eigen::Index r, Eigen::Index c, const char* name) {
      if (m.rows() != r || m.cols() != c) {
        throw Error(ErrorKind::shape_mismatch, std::string("lstm parameter ") + name + " has shape " +
                                                   std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
      }
      if (!m.allFinite()) throw Error(ErrorKind::non_finite, std::string("lstm parameter ") + name + " is not finite");
    };
    check(w_x_input, dh, dx, "w_x_input");
    check(w_h_input, dh, dh, "w_h_input");
    check(w_c_input, dh, dh, "w_c_input");
    check(b_input, dh, 1, "b_input");
    check(w_x_cand, dh, dx, "w_x_cand");
    check(w_h_cand, dh, dh, "w_h_cand");
    check(b_cand, dh, 1, "b_cand");
    check(w_x_output, dh, dx, "w_x_output");
    check(w_h_output, dh, dh, "w_h_output");
    check(w_c_output, dh, dh, "w_c_output");
    check(b_output, dh, 1, "b_output");
  }

  template <class F, class... Cells>
  static void visit(const std::string& prefix, F&& f, Cells&... cells) {
    const std::string p = prefix.empty() ? "" : prefix + ".";
    f(p + "w_x_input", cells.w_x_input...);
    f(p + "w_h_input", cells.w_h_input...);
    f(p + "w_c_input", cells.w_c_input...);
    f(p + "b_input", cells.b_input...);
    f(p + "w_x_cand", cells.w_x_cand...);
    f(p + "w_h_cand", cells.w_h_cand...);
    f(p + "b_cand", cells.b_cand...);
    f(p + "w_x_output", cells.w_x_output...);
    f(p + "w_h_output", cells.w_h_output...);
    f(p + "w_c_output", cells.w_c_output...);
    f(p + "b_output", cells.b_output...);
  }
};

struct LstmState {
  Vec h;
  Vec c;

  static LstmState zeros(Eigen::Index hidden_dim) { return {Vec::Zero(hidden_dim), Vec::Zero(hidden_dim)}; }
};

// Intermediates of one step, kept for the reverse pass.
struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec input_gate, candidate, c, output_gate, tanh_c;
};

inline LstmState lstm_step(const LstmCellParams& p, const Vec& x, const LstmState& prev,
                           LstmStepCache* cache = nullptr) {
  detail::require_size(x.size(), p.input_dim(), "lstm input");
  detail::require_size(prev.h.size(), p.hidden_dim(), "lstm hidden state");
  detail::require_size(prev.c.size(), p.hidden_dim(), "lstm cell state");

  const Vec i = detail::sigmoid(p.w_x_input * x + p.w_h_input * prev.h + p.w_c_input * prev.c + p.b_input);
  const Vec g = (p.w_x_cand * x + p.w_h_cand * prev.h + p.b_cand).array().tanh().matrix();
  Vec c = (1.0 - i.array()) * prev.c.array() + i.array() * g.array();
  const Vec o = detail::sigmoid(p.w_x_output * x + p.w_h_output * prev.h + p.w_c_output * c + p.b_output);
  const Vec tc = c.array().tanh().matrix();
  Vec h = o.cwiseProduct(tc);
  if (cache != nullptr) {
    *cache = {x, prev.h, prev.c, i, g, c, o, tc};
  }
  return {std::move(h), std::move(c)};
}

struct LstmSequenceCache {
  std::vector<LstmStepCache> steps;
};

// Runs the cell over xs from a zero state and returns every hidden output.
inline std::vector<Vec> lstm_forward(const LstmCellParams& p, std::span<const Vec> xs,
                                     LstmSequenceCache* cache = nullptr) {
  std::vector<Vec> hs;
  hs.reserve(xs.size());
  auto state = LstmState::zeros(p.hidden_dim());
  if (cache != nullptr) cache->steps.assign(xs.size(), {});
  for (std::size_t t = 0; t < xs.size(); ++t) {
    state = lstm_step(p, xs[t], state, cache != nullptr ? &cache->steps[t] : nullptr);
    hs.push_back(state.h);
  }
  return hs;
}

// Reverse pass over a cached sequence. d_hs[t] is the upstream gradient on h_t and
// d_c_last an optional upstream gradient on the final cell state. Parameter gradients
// accumulate into grad; the return value holds dL/dx_t.
inline std::vector<Vec> lstm_backward(const LstmCellParams& p, const LstmSequenceCache& cache,
                                      std::span<const Vec> d_hs, LstmCellParams& grad,
                                      const Vec* d_c_last = nullptr) {
  if (cache.steps.empty()) {
    throw Error(ErrorKind::no_forward_state, "lstm backward called without a cached forward pass");
  }
  detail::require_size(static_cast<Eigen::Index>(d_hs.size()),
                       static_cast<Eigen::Index>(cache.steps.size()), "lstm upstream gradient length");
  const auto dh_dim = p.hidden_dim();
  std::vector<Vec> dxs(cache.steps.size());
  Vec dh_next = Vec::Zero(dh_dim);
  Vec dc_next = d_c_last != nullptr ? *d_c_last : Vec::Zero(dh_dim);

  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    const auto& s = cache.steps[t];
    const Vec dh = d_hs[t] + dh_next;

    const Vec da_o = (dh.array() * s.tanh_c.array() * s.output_gate.array() * (1.0 - s.output_gate.array())).matrix();
    Vec dc = dc_next;
    dc.array() += dh.array() * s.output_gate.array() * (1.0 - s.tanh_c.array().square());
    dc.noalias() += p.w_c_output.transpose() * da_o;

    const Vec da_i = (dc.array() * (s.candidate.array() - s.c_prev.array()) * s.input_gate.array() *
                      (1.0 - s.input_gate.array())).matrix();
    const Vec da_g = (dc.array() * s.input_gate.array() * (1.0 - s.candidate.array().square())).matrix();

    grad.w_x_input.noalias() += da_i * s.x.transpose();
    grad.w_h_input.noalias() += da_i * s.h_prev.transpose();
    grad.w_c_input.noalias() += da_i * s.c_prev.transpose();
    grad.b_input += da_i;
    grad.w_x_cand.noalias() += da_g * s.x.transpose();
    grad.w_h_cand.noalias() += da_g * s.h_prev.transpose();
    grad.b_cand += da_g;
    grad.w_x_output.noalias() += da_o * s.x.transpose();
    grad.w_h_output.noalias() += da_o * s.h_prev.transpose();
    grad.w_c_output.noalias() += da_o * s.c.transpose();
    grad.b_output += da_o;

    dxs[t] = p.w_x_input.transpose() * da_i + p.w_x_cand.transpose() * da_g + p.w_x_output.transpose() * da_o;
    dh_next = p.w_h_input.transpose() * da_i + p.w_h_cand.transpose() * da_g + p.w_h_output.transpose() * da_o;
    dc_next = (dc.array() * (1.0 - s.input_gate.array())).matrix();
    dc_next.noalias() += p.w_c_input.transpose() * da_i;
  }
  return dxs;
}

struct BilstmCache {
  LstmSequenceCache forward;
  LstmSequenceCache backward;
};

// Output t is [h_fwd(t); h_bwd(t)] where the backward cell reads the sequence reversed.
inline std::vector<Vec> bilstm_forward(const LstmCellParams& fwd, const LstmCellParams& bwd,
                                       std::span<const Vec> xs, BilstmCache* cache = nullptr) {
  if (xs.empty()) throw Error(ErrorKind::empty_input, "bilstm_forward needs a nonempty sequence");
  if (fwd.input_dim() != bwd.input_dim()) {
    throw Error(ErrorKind::shape_mismatch, "forward and backward cells disagree on input dimension");
  }
  const auto hf = lstm_forward(fwd, xs, cache != nullptr ? &cache->forward : nullptr);
  std::vector<Vec> reversed(xs.rbegin(), xs.rend());
  const auto hb = lstm_forward(bwd, reversed, cache != nullptr ? &cache->backward : nullptr);

  const std::size_t n = xs.size();
  std::vector<Vec> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    out[t].resize(fwd.hidden_dim() + bwd.hidden_dim());
    out[t] << hf[t], hb[n - 1 - t];
  }
  return out;
}

inline std::vector<Vec> bilstm_backward(const LstmCellParams& fwd, const LstmCellParams& bwd,
                                        const BilstmCache& cache, std::span<const Vec> d_out,
                                        LstmCellParams& grad_fwd, LstmCellParams& grad_bwd) {
  const std::size_t n = d_out.size();
  const auto df = fwd.hidden_dim(), db = bwd.hidden_dim();
  std::vector<Vec> d_hf(n), d_hb(n);
  for (std::size_t t = 0; t < n; ++t) {
    detail::require_size(d_out[t].size(), df + db, "bilstm upstream gradient");
    d_hf[t] = d_out[t].head(df);
    d_hb[n - 1 - t] = d_out[t].tail(db);
  }
  auto dx = lstm_backward(fwd, cache.forward, d_hf, grad_fwd);
  const auto dx_rev = lstm_backward(bwd, cache.backward, d_hb, grad_bwd);
  for (std::size_t t = 0; t < n; ++t) dx[t] += dx_rev[n - 1 - t];
  return dx;
}

enum class PoolMode { mean, max };

// FC1 (scene) and FC2 (per proposal, pooled) are concatenated and projected by FC3.
// All three layers are linear.
struct FusionHeadParams {
  DenseLayer fc1;
  DenseLayer fc2;
  DenseLayer fc3;
  PoolMode pool = PoolMode::mean;

  static constexpr int kSceneOut = 500;
  static constexpr int kObjectOut = 400;
  static constexpr int kFusedOut = 500;

  static FusionHeadParams zeros(Eigen::Index scene_in, Eigen::Index object_in, Eigen::Index scene_out = kSceneOut,
                                Eigen::Index object_out = kObjectOut, Eigen::Index fused_out = kFusedOut) {
    return {DenseLayer::zeros(scene_in, scene_out), DenseLayer::zeros(object_in, object_out),
            DenseLayer::zeros(scene_out + object_out, fused_out), PoolMode::mean};
  }

  static FusionHeadParams random(Eigen::Index scene_in, Eigen::Index object_in, Rng& rng,
                                 Eigen::Index scene_out = kSceneOut, Eigen::Index object_out = kObjectOut,
                                 Eigen::Index fused_out = kFusedOut) {
    FusionHeadParams p;
    p.fc1 = DenseLayer::random(scene_in, scene_out, rng);
    p.fc2 = DenseLayer::random(object_in, object_out, rng);
    p.fc3 = DenseLayer::random(scene_out + object_out, fused_out, rng);
    return p;
  }

  Eigen::Index output_dim() const { return fc3.out_dim(); }

  void validate() const {
    if (fc3.in_dim() != fc1.out_dim() + fc2.out_dim()) {
      throw Error(ErrorKind::shape_mismatch, "FC3 input must equal FC1 output plus FC2 output");
    }
  }

  template <class F, class... Heads>
  static void visit(const std::string& prefix, F&& f, Heads&... heads) {
    DenseLayer::visit(prefix + ".fc1", f, heads.fc1...);
    DenseLayer::visit(prefix + ".fc2", f, heads.fc2...);
    DenseLayer::visit(prefix + ".fc3", f, heads.fc3...);
  }
};

struct FusionCache {
  Vec scene;
  std::vector<Vec> proposals;
  Vec concat;
  std::vector<Eigen::Index> argmax;  // per pooled unit, proposal index; max pooling only
};

inline Vec fusion_forward(const FusionHeadParams& head, const Vec& scene_feat, std::span<const Vec> object_feats,
                          FusionCache* cache = nullptr) {
  head.validate();
  const Vec scene_out = head.fc1.forward(scene_feat);
  Vec pooled = Vec::Zero(head.fc2.out_dim());
  std::vector<Eigen::Index> argmax;
  if (!object_feats.empty()) {
    std::vector<Vec> outs;
    outs.reserve(object_feats.size());
    for (const auto& obj : object_feats) outs.push_back(head.fc2.forward(obj));
    if (head.pool == PoolMode::mean) {
      for (const auto& o : outs) pooled += o;
      pooled /= static_cast<double>(outs.size());
    } else {
      pooled = outs[0];
      argmax.assign(pooled.size(), 0);
      for (std::size_t j = 1; j < outs.size(); ++j) {
        for (Eigen::Index u = 0; u < pooled.size(); ++u) {
          if (outs[j](u) > pooled(u)) {
            pooled(u) = outs[j](u);
            argmax[u] = static_cast<Eigen::Index>(j);
          }
        }
      }
    }
  }
  Vec concat(scene_out.size() + pooled.size());
  concat << scene_out, pooled;
  Vec out = head.fc3.forward(concat);
  if (cache != nullptr) {
    cache->scene = scene_feat;
    cache->proposals.assign(object_feats.begin(), object_feats.end());
    cache->concat = std::move(concat);
    cache->argmax = std::move(argmax);
  }
  return out;
}

inline void fusion_backward(const FusionHeadParams& head, const FusionCache& cache, const Vec& d_out,
                            FusionHeadParams& grad) {
  if (cache.concat.size() == 0) {
    throw Error(ErrorKind::no_forward_state, "fusion backward called without a cached forward pass");
  }
  const Vec d_concat = head.fc3.backward(cache.concat, d_out, grad.fc3);
  const auto n1 = head.fc1.out_dim();
  head.fc1.backward(cache.scene, d_concat.head(n1), grad.fc1);
  if (cache.proposals.empty()) return;
  const Vec d_pooled = d_concat.tail(head.fc2.out_dim());
  if (head.pool == PoolMode::mean) {
    const Vec d_each = d_pooled / static_cast<double>(cache.proposals.size());
    for (const auto& obj : cache.proposals) head.fc2.backward(obj, d_each, grad.fc2);
  } else {
    for (std::size_t j = 0; j < cache.proposals.size(); ++j) {
      Vec d = Vec::Zero(d_pooled.size());
      for (Eigen::Index u = 0; u < d.size(); ++u) {
        if (cache.argmax[u] == static_cast<Eigen::Index>(j)) d(u) = d_pooled(u);
      }
      head.fc2.backward(cache.proposals[j], d, grad.fc2);
    }
  }
}

// Maps each BiLSTM output (width 2*d_h) to one row of raw scores over the k labels.
struct EmissionProjection {
  DenseLayer layer;

  Eigen::Index num_labels() const { return layer.out_dim(); }

  template <class F, class... Projs>
  static void visit(const std::string& prefix, F&& f, Projs&... projs) {
    DenseLayer::visit(prefix, f, projs.layer...);
  }
};

inline Mat emission_forward(const EmissionProjection& proj, std::span<const Vec> hs) {
  Mat scores(static_cast<Eigen::Index>(hs.size()), proj.num_labels());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    scores.row(static_cast<Eigen::Index>(i)) = proj.layer.forward(hs[i]).transpose();
  }
  return scores;
}

// d_scores is n x k; returns dL/dh_i.
inline std::vector<Vec> emission_backward(const EmissionProjection& proj, std::span<const Vec> hs,
                                          const Mat& d_scores, EmissionProjection& grad) {
  detail::require_size(d_scores.rows(), static_cast<Eigen::Index>(hs.size()), "emission gradient rows");
  detail::require_size(d_scores.cols(), proj.num_labels(), "emission gradient columns");
  std::vector<Vec> dh(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    dh[i] = proj.layer.backward(hs[i], d_scores.row(static_cast<Eigen::Index>(i)).transpose(), grad.layer);
  }
  return dh;
}

}  // namespace lifelog
