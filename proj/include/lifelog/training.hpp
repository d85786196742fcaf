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
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lifelog/core_types.hpp"
#include "lifelog/crf.hpp"
#include "lifelog/model.hpp"
#include "lifelog/random.hpp"

namespace lifelog {

inline constexpr int kDefaultWindow = 15;

// window: independent BiLSTM + Viterbi per consecutive window.
// whole_day: one pass over the entire day.
enum class DecodeMode { window, whole_day };

// Splits each day into consecutive non-overlapping windows; the last window of a day
// keeps whatever length remains. Labels are attached when every frame in the day has one.
inline std::vector<SequenceExample> make_windows(std::span<const DayLog> days, InputMode mode,
                                                 int window = kDefaultWindow, bool require_labels = true) {
  if (window < 1) throw Error(ErrorKind::invalid_argument, "window length must be positive");
  std::vector<SequenceExample> out;
  for (const auto& day : days) {
    const int n = static_cast<int>(day.frames.size());
    for (int start = 0; start < n; start += window) {
      const int end = std::min(n, start + window);
      SequenceExample ex;
      ex.frames.reserve(static_cast<std::size_t>(end - start));
      for (int i = start; i < end; ++i) {
        const auto& f = day.frames[static_cast<std::size_t>(i)];
        ex.frames.push_back(frame_input(f, mode));
        if (f.activity) {
          ex.labels.push_back(code_of(*f.activity));
        } else if (require_labels) {
          throw Error(ErrorKind::missing_label, "day " + std::to_string(day.day_id) + " frame " +
                                                    std::to_string(f.idx) + " has no activity");
        }
      }
      if (ex.labels.size() != ex.frames.size()) ex.labels.clear();
      out.push_back(std::move(ex));
    }
  }
  return out;
}

struct TrainOptions {
  double learning_rate = 0.05;
  int epochs = 10;
  int batch_size = 16;       // windows per update; <= 0 means the whole set
  double clip_norm = 5.0;    // global gradient norm cap; <= 0 disables
  bool shuffle = true;
  std::uint64_t seed = 0;
};

struct TrainingTrace {
  std::vector<double> epoch_loss;  // mean NLL per window over each epoch
};

namespace detail {

inline double squared_norm(const BilstmCrfModel& g) {
  double s = 0.0;
  BilstmCrfModel::visit([&](const std::string&, const auto& t) { s += t.squaredNorm(); }, g);
  return s;
}

}  // namespace detail

// Mini-batch SGD on the mean CRF negative log-likelihood, jointly over all parameters.
inline TrainingTrace fit(BilstmCrfModel& model, std::span<const SequenceExample> examples, const TrainOptions& opts,
                         const std::function<void(int, double)>& on_epoch = {}) {
  if (examples.empty()) throw Error(ErrorKind::empty_input, "training set is empty");
  for (std::size_t e = 0; e < examples.size(); ++e) {
    if (examples[e].labels.size() != examples[e].frames.size() || examples[e].frames.empty()) {
      throw Error(ErrorKind::missing_label, "training window " + std::to_string(e) + " is unlabeled or empty");
    }
  }
  if (opts.epochs < 0) throw Error(ErrorKind::invalid_argument, "epochs must be non-negative");

  Rng rng(opts.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = opts.batch_size <= 0 ? examples.size() : static_cast<std::size_t>(opts.batch_size);

  TrainingTrace trace;
  auto grad = model.zeros_like();
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    if (opts.shuffle) shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      BilstmCrfModel::visit([](const std::string&, auto& t) { t.setZero(); }, grad);
      for (std::size_t b = begin; b < end; ++b) {
        const double loss = joint_nll(model, examples[order[b]], &grad);
        if (!std::isfinite(loss)) {
          throw Error(ErrorKind::non_finite, "non-finite loss at epoch " + std::to_string(epoch) + ", window " +
                                                 std::to_string(order[b]) + " (value " + std::to_string(loss) + ")");
        }
        total += loss;
      }
      double scale = opts.learning_rate / static_cast<double>(end - begin);
      if (opts.clip_norm > 0.0) {
        const double norm = std::sqrt(detail::squared_norm(grad)) / static_cast<double>(end - begin);
        if (!std::isfinite(norm)) {
          throw Error(ErrorKind::non_finite, "non-finite gradient at epoch " + std::to_string(epoch));
        }
        if (norm > opts.clip_norm) scale *= opts.clip_norm / norm;
      }
      if (scale != 0.0) {
        BilstmCrfModel::visit(
            [&](const std::string&, auto& p, const auto& g) {
              for (Eigen::Index i = 0; i < p.size(); ++i) {
                if (std::isfinite(p.data()[i])) p.data()[i] -= scale * g.data()[i];
              }
            },
            model, grad);
      }
    }
    trace.epoch_loss.push_back(total / static_cast<double>(examples.size()));
    if (on_epoch) on_epoch(epoch, trace.epoch_loss.back());
  }
  return trace;
}

inline LabelSequence decode_sequence(const BilstmCrfModel& model, std::span<const FrameInput> frames) {
  return viterbi(model_forward(model, frames), model.transitions).labels;
}

// Predicted label codes for every frame of a day.
inline LabelSequence decode_day(const BilstmCrfModel& model, const DayLog& day, DecodeMode mode = DecodeMode::window,
                                int window = kDefaultWindow) {
  if (day.frames.empty()) return {};
  const int w = mode == DecodeMode::whole_day ? static_cast<int>(day.frames.size()) : window;
  const auto windows = make_windows(std::span<const DayLog>(&day, 1), model.config.input_mode, w, false);
  LabelSequence out;
  out.reserve(day.frames.size());
  for (const auto& ex : windows) {
    const auto labels = decode_sequence(model, ex.frames);
    out.insert(out.end(), labels.begin(), labels.end());
  }
  return out;
}

}  // namespace lifelog
