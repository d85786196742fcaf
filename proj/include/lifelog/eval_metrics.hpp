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
#include <numeric>
#include <span>
#include <vector>

#include "lifelog/core_types.hpp"
#include "lifelog/error.hpp"

namespace lifelog {

// Rows are truth, columns are prediction.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int k) : k_(k), counts_(static_cast<std::size_t>(k) * k, 0) {
    if (k < 1) throw Error(ErrorKind::invalid_argument, "confusion matrix needs at least one class");
  }

  int classes() const { return k_; }
  std::uint64_t at(int truth, int pred) const { return counts_[index(truth, pred)]; }
  std::uint64_t& at(int truth, int pred) { return counts_[index(truth, pred)]; }

  std::uint64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

  std::uint64_t trace() const {
    std::uint64_t t = 0;
    for (int c = 0; c < k_; ++c) t += at(c, c);
    return t;
  }

  std::uint64_t row_sum(int truth) const {
    std::uint64_t s = 0;
    for (int p = 0; p < k_; ++p) s += at(truth, p);
    return s;
  }

  std::uint64_t col_sum(int pred) const {
    std::uint64_t s = 0;
    for (int t = 0; t < k_; ++t) s += at(t, pred);
    return s;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t index(int truth, int pred) const {
    if (truth < 0 || truth >= k_ || pred < 0 || pred >= k_) {
      throw Error(ErrorKind::out_of_range, "class code out of range for a " + std::to_string(k_) + "-class matrix");
    }
    return static_cast<std::size_t>(truth) * k_ + pred;
  }

  int k_;
  std::vector<std::uint64_t> counts_;
};

inline ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int k) {
  if (preds.size() != truth.size()) {
    throw Error(ErrorKind::length_mismatch, "predictions (" + std::to_string(preds.size()) + ") and truth (" +
                                                std::to_string(truth.size()) + ") differ in length");
  }
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < preds.size(); ++i) ++cm.at(truth[i], preds[i]);
  return cm;
}

struct MacroMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;           // mean of per-class F1
  double macro_f1_of_means = 0.0;  // harmonic mean of macro precision and macro recall
  std::vector<double> precision, recall, f1;
};

// Classes with a zero denominator score 0 and still count toward the macro means.
inline MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error(ErrorKind::empty_input, "macro metrics of an empty confusion matrix");
  const int k = cm.classes();
  MacroMetrics m;
  m.precision.resize(k);
  m.recall.resize(k);
  m.f1.resize(k);
  for (int c = 0; c < k; ++c) {
    const double tp = static_cast<double>(cm.at(c, c));
    const double predicted = static_cast<double>(cm.col_sum(c));
    const double actual = static_cast<double>(cm.row_sum(c));
    m.precision[c] = predicted > 0 ? tp / predicted : 0.0;
    m.recall[c] = actual > 0 ? tp / actual : 0.0;
    const double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr > 0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;
  }
  auto mean = [k](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / k; };
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  m.macro_precision = mean(m.precision);
  m.macro_recall = mean(m.recall);
  m.macro_f1 = mean(m.f1);
  const double pr = m.macro_precision + m.macro_recall;
  m.macro_f1_of_means = pr > 0 ? 2.0 * m.macro_precision * m.macro_recall / pr : 0.0;
  return m;
}

inline ConfusionMatrix collapse_to_groups(const ConfusionMatrix& cm, const GroupMap& gmap) {
  if (cm.classes() != kNumActivities) {
    throw Error(ErrorKind::shape_mismatch, "group collapse needs a 12-class matrix, got " +
                                               std::to_string(cm.classes()));
  }
  ConfusionMatrix out(kNumGroups);
  for (int t = 0; t < kNumActivities; ++t) {
    for (int p = 0; p < kNumActivities; ++p) {
      out.at(code_of(gmap(static_cast<Activity>(t))), code_of(gmap(static_cast<Activity>(p)))) += cm.at(t, p);
    }
  }
  return out;
}

}  // namespace lifelog
