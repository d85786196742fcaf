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

#include <cstdint>
#include <span>
#include <tuple>
#include <string>
#include <vector>

#include "lifelog/core_types.hpp"
#include "lifelog/crf.hpp"
#include "lifelog/neural_head.hpp"
#include "lifelog/random.hpp"

namespace lifelog {

// emissions: each frame's supplied score vector is the BiLSTM input.
// features:  scene/object features pass through the fusion head first.
enum class InputMode { emissions, features };

struct ModelConfig {
  InputMode input_mode = InputMode::emissions;
  int num_labels = kNumActivities;
  int hidden_dim = 16;
  int scene_dim = 0;
  int object_dim = 0;
  int scene_out = FusionHeadParams::kSceneOut;
  int object_out = FusionHeadParams::kObjectOut;
  int fused_out = FusionHeadParams::kFusedOut;
  PoolMode pool = PoolMode::mean;

  int input_dim() const { return input_mode == InputMode::features ? fused_out : num_labels; }

  void validate() const {
    if (num_labels < 1 || hidden_dim < 1) throw Error(ErrorKind::invalid_argument, "model dimensions must be positive");
    if (input_mode == InputMode::features &&
        (scene_dim < 1 || object_dim < 1 || scene_out < 1 || object_out < 1 || fused_out < 1)) {
      throw Error(ErrorKind::invalid_argument, "feature mode needs positive scene/object/fusion dimensions");
    }
  }

  bool operator==(const ModelConfig&) const = default;
};

// Every trainable tensor of the recognizer. The same type doubles as a gradient buffer.
struct BilstmCrfModel {
  ModelConfig config;
  FusionHeadParams fusion;
  LstmCellParams forward_cell;
  LstmCellParams backward_cell;
  EmissionProjection projection;
  TransitionMatrix transitions;

  static BilstmCrfModel zeros(const ModelConfig& cfg) {
    cfg.validate();
    BilstmCrfModel m;
    m.config = cfg;
    if (cfg.input_mode == InputMode::features) {
      m.fusion = FusionHeadParams::zeros(cfg.scene_dim, cfg.object_dim, cfg.scene_out, cfg.object_out, cfg.fused_out);
    } else {
      m.fusion = FusionHeadParams::zeros(0, 0, 0, 0, 0);
    }
    m.fusion.pool = cfg.pool;
    m.forward_cell = LstmCellParams::zeros(cfg.input_dim(), cfg.hidden_dim);
    m.backward_cell = LstmCellParams::zeros(cfg.input_dim(), cfg.hidden_dim);
    m.projection.layer = DenseLayer::zeros(2 * cfg.hidden_dim, cfg.num_labels);
    m.transitions = TransitionMatrix::zeros(cfg.num_labels);
    return m;
  }

  // Glorot-uniform weights, zero biases, zero transitions (apart from the START/STOP mask).
  static BilstmCrfModel create(const ModelConfig& cfg, std::uint64_t seed) {
    auto m = zeros(cfg);
    Rng rng(seed);
    if (cfg.input_mode == InputMode::features) {
      m.fusion = FusionHeadParams::random(cfg.scene_dim, cfg.object_dim, rng, cfg.scene_out, cfg.object_out,
                                          cfg.fused_out);
      m.fusion.pool = cfg.pool;
    }
    m.forward_cell = LstmCellParams::random(cfg.input_dim(), cfg.hidden_dim, rng);
    m.backward_cell = LstmCellParams::random(cfg.input_dim(), cfg.hidden_dim, rng);
    m.projection.layer = DenseLayer::random(2 * cfg.hidden_dim, cfg.num_labels, rng);
    return m;
  }

  // Gradient buffer with this model's shapes, all zero.
  BilstmCrfModel zeros_like() const {
    auto g = zeros(config);
    g.transitions.scores.setZero();
    return g;
  }

  // Calls f(name, tensor...) for each tensor across the given models in a fixed order.
  // The fusion head is skipped in emissions mode.
  template <class F, class... Models>
  static void visit(F&& f, Models&... models) {
    const auto& first = std::get<0>(std::forward_as_tuple(models...));
    if (first.config.input_mode == InputMode::features) FusionHeadParams::visit("fusion", f, models.fusion...);
    LstmCellParams::visit("lstm_fwd", f, models.forward_cell...);
    LstmCellParams::visit("lstm_bwd", f, models.backward_cell...);
    EmissionProjection::visit("projection", f, models.projection...);
    f(std::string("crf.transitions"), models.transitions.scores...);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    visit([&](const std::string&, const auto& t) { n += static_cast<std::size_t>(t.size()); }, *this);
    return n;
  }
};

// Per-frame model input.
struct FrameInput {
  Vec emissions;
  Vec scene;
  std::vector<Vec> objects;
};

struct SequenceExample {
  std::vector<FrameInput> frames;
  LabelSequence labels;  // empty when unlabeled
};

inline FrameInput frame_input(const FrameRecord& f, InputMode mode) {
  FrameInput in;
  if (mode == InputMode::emissions) {
    if (!f.emissions) {
      throw Error(ErrorKind::invalid_argument, "day " + std::to_string(f.day_id) + " frame " +
                                                   std::to_string(f.idx) + " has no emissions");
    }
    in.emissions = Eigen::Map<const Vec>(f.emissions->data(), static_cast<Eigen::Index>(f.emissions->size()));
  } else {
    if (!f.scene_feat) {
      throw Error(ErrorKind::invalid_argument, "day " + std::to_string(f.day_id) + " frame " +
                                                   std::to_string(f.idx) + " has no scene feature");
    }
    in.scene = Eigen::Map<const Vec>(f.scene_feat->data(), static_cast<Eigen::Index>(f.scene_feat->size()));
    if (f.object_feats) {
      for (const auto& o : *f.object_feats) {
        in.objects.push_back(Eigen::Map<const Vec>(o.data(), static_cast<Eigen::Index>(o.size())));
      }
    }
  }
  return in;
}

// Cached intermediates of one forward pass.
struct ForwardTape {
  std::vector<FusionCache> fusion;
  std::vector<Vec> inputs;
  BilstmCache bilstm;
  std::vector<Vec> hidden;
  Mat emissions;

  bool empty() const { return hidden.empty(); }
};

// Emission matrix P (n x k) for one sequence.
inline Mat model_forward(const BilstmCrfModel& model, std::span<const FrameInput> frames, ForwardTape* tape = nullptr) {
  if (frames.empty()) throw Error(ErrorKind::empty_input, "cannot run the model on an empty sequence");
  std::vector<Vec> xs;
  xs.reserve(frames.size());
  std::vector<FusionCache> fcache;
  if (model.config.input_mode == InputMode::features) {
    if (tape != nullptr) fcache.resize(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      xs.push_back(fusion_forward(model.fusion, frames[t].scene, frames[t].objects,
                                  tape != nullptr ? &fcache[t] : nullptr));
    }
  } else {
    for (const auto& f : frames) xs.push_back(f.emissions);
  }
  BilstmCache bcache;
  auto hs = bilstm_forward(model.forward_cell, model.backward_cell, xs, tape != nullptr ? &bcache : nullptr);
  Mat scores = emission_forward(model.projection, hs);
  if (tape != nullptr) {
    tape->fusion = std::move(fcache);
    tape->inputs = std::move(xs);
    tape->bilstm = std::move(bcache);
    tape->hidden = std::move(hs);
    tape->emissions = scores;
  }
  return scores;
}

// Back-propagates dL/dP through projection, BiLSTM and fusion into grad.
inline void model_backward(const BilstmCrfModel& model, const ForwardTape& tape, const Mat& d_emissions,
                           BilstmCrfModel& grad) {
  if (tape.empty()) throw Error(ErrorKind::no_forward_state, "model backward called without a cached forward pass");
  const auto d_hidden = emission_backward(model.projection, tape.hidden, d_emissions, grad.projection);
  const auto d_inputs = bilstm_backward(model.forward_cell, model.backward_cell, tape.bilstm, d_hidden,
                                        grad.forward_cell, grad.backward_cell);
  if (model.config.input_mode == InputMode::features) {
    for (std::size_t t = 0; t < d_inputs.size(); ++t) fusion_backward(model.fusion, tape.fusion[t], d_inputs[t], grad.fusion);
  }
}

// CRF negative log-likelihood of the example's labels. When grad is given, the
// gradient of the loss is added to it.
inline double joint_nll(const BilstmCrfModel& model, const SequenceExample& ex, BilstmCrfModel* grad = nullptr) {
  if (ex.labels.size() != ex.frames.size()) {
    throw Error(ErrorKind::length_mismatch, "example labels do not match its frames");
  }
  ForwardTape tape;
  const Mat P = model_forward(model, ex.frames, grad != nullptr ? &tape : nullptr);
  if (grad == nullptr) {
    return log_partition(P, model.transitions) - sequence_score(P, model.transitions, ex.labels);
  }
  auto r = nll_and_grad(P, model.transitions, ex.labels);
  grad->transitions.scores += r.d_transitions;
  model_backward(model, tape, r.d_emissions, *grad);
  return r.loss;
}

}  // namespace lifelog
