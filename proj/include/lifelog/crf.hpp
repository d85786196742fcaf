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
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lifelog/error.hpp"
#include "lifelog/neural_head.hpp"

namespace lifelog {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Transition scores over k labels plus two virtual states. Row/column k is START,
// k + 1 is STOP. Entering START and leaving STOP are masked with -inf. Any other
// entry may also be set to -inf to forbid a transition outright.
struct TransitionMatrix {
  Mat scores;

  static TransitionMatrix zeros(int num_labels) {
    TransitionMatrix t{Mat::Zero(num_labels + 2, num_labels + 2)};
    t.apply_mask();
    return t;
  }

  int num_labels() const { return static_cast<int>(scores.rows()) - 2; }
  int start() const { return num_labels(); }
  int stop() const { return num_labels() + 1; }

  double operator()(int from, int to) const { return scores(from, to); }
  double& operator()(int from, int to) { return scores(from, to); }

  static bool is_structural_mask(int from, int to, int k) { return to == k || from == k + 1 || (from == k && to == k + 1); }

  void apply_mask() {
    const int k = num_labels();
    for (int a = 0; a < k + 2; ++a) {
      for (int b = 0; b < k + 2; ++b) {
        if (is_structural_mask(a, b, k)) scores(a, b) = kNegInf;
      }
    }
  }

  void validate() const {
    if (scores.rows() != scores.cols() || scores.rows() < 3) {
      throw Error(ErrorKind::shape_mismatch, "transition matrix must be (k+2)x(k+2) with k >= 1");
    }
    for (Eigen::Index a = 0; a < scores.rows(); ++a) {
      for (Eigen::Index b = 0; b < scores.cols(); ++b) {
        const double v = scores(a, b);
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
          throw Error(ErrorKind::non_finite, "transition matrix holds NaN or +inf");
        }
      }
    }
  }
};

using EmissionMatrix = Mat;      // n x k raw scores (log-potentials)
using LabelSequence = std::vector<int>;

namespace detail {

inline void check_crf_inputs(const EmissionMatrix& emissions, const TransitionMatrix& trans) {
  if (emissions.rows() < 1) throw Error(ErrorKind::empty_input, "emission matrix has no rows");
  if (emissions.cols() != trans.num_labels()) {
    throw Error(ErrorKind::shape_mismatch, "emission matrix has " + std::to_string(emissions.cols()) +
                                               " columns but transitions cover " +
                                               std::to_string(trans.num_labels()) + " labels");
  }
  if (!emissions.allFinite()) throw Error(ErrorKind::non_finite, "emission matrix holds non-finite entries");
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// alpha(i, j): log-sum of scores of all prefixes ending in label j at frame i.
inline Mat forward_table(const EmissionMatrix& P, const TransitionMatrix& A) {
  const auto n = P.rows();
  const int k = A.num_labels();
  Mat alpha(n, k);
  for (int j = 0; j < k; ++j) alpha(0, j) = A(A.start(), j) + P(0, j);
  std::vector<double> buf(k);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int p = 0; p < k; ++p) buf[p] = alpha(i - 1, p) + A(p, j);
      alpha(i, j) = log_sum_exp(buf) + P(i, j);
    }
  }
  return alpha;
}

// beta(i, j): log-sum of scores of all suffixes after frame i given label j there.
inline Mat backward_table(const EmissionMatrix& P, const TransitionMatrix& A) {
  const auto n = P.rows();
  const int k = A.num_labels();
  Mat beta(n, k);
  for (int j = 0; j < k; ++j) beta(n - 1, j) = A(j, A.stop());
  std::vector<double> buf(k);
  for (Eigen::Index i = n - 1; i-- > 0;) {
    for (int j = 0; j < k; ++j) {
      for (int q = 0; q < k; ++q) buf[q] = A(j, q) + P(i + 1, q) + beta(i + 1, q);
      beta(i, j) = log_sum_exp(buf);
    }
  }
  return beta;
}

inline double close_partition(const Mat& alpha, const TransitionMatrix& A) {
  const int k = A.num_labels();
  std::vector<double> buf(k);
  for (int j = 0; j < k; ++j) buf[j] = alpha(alpha.rows() - 1, j) + A(j, A.stop());
  return log_sum_exp(buf);
}

}  // namespace detail

// Accumulated left to right as (score + transition) + emission, the same order the
// Viterbi recursion uses, so the decoded score reproduces bit-for-bit.
inline double sequence_score(const EmissionMatrix& P, const TransitionMatrix& A, std::span<const int> y) {
  detail::check_crf_inputs(P, A);
  if (static_cast<Eigen::Index>(y.size()) != P.rows()) {
    throw Error(ErrorKind::length_mismatch, "label sequence length " + std::to_string(y.size()) +
                                                " does not match " + std::to_string(P.rows()) + " frames");
  }
  const int k = A.num_labels();
  for (int label : y) {
    if (label < 0 || label >= k) throw Error(ErrorKind::out_of_range, "label out of range: " + std::to_string(label));
  }
  double s = A(A.start(), y[0]) + P(0, y[0]);
  for (std::size_t i = 1; i < y.size(); ++i) {
    s = s + A(y[i - 1], y[i]);
    s = s + P(static_cast<Eigen::Index>(i), y[i]);
  }
  return s + A(y.back(), A.stop());
}

struct ViterbiResult {
  LabelSequence labels;
  double score = 0.0;
};

// Ties resolve to the lowest label code, both for the final label and at every backpointer.
inline ViterbiResult viterbi(const EmissionMatrix& P, const TransitionMatrix& A) {
  detail::check_crf_inputs(P, A);
  const auto n = P.rows();
  const int k = A.num_labels();
  std::vector<double> delta(k), next(k);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> back(n, k);

  for (int j = 0; j < k; ++j) delta[j] = A(A.start(), j) + P(0, j);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      int best = 0;
      double best_v = delta[0] + A(0, j);
      for (int p = 1; p < k; ++p) {
        const double v = delta[p] + A(p, j);
        if (v > best_v) {
          best_v = v;
          best = p;
        }
      }
      back(i, j) = best;
      next[j] = best_v + P(i, j);
    }
    std::swap(delta, next);
  }

  int last = 0;
  double best = delta[0] + A(0, A.stop());
  for (int j = 1; j < k; ++j) {
    const double v = delta[j] + A(j, A.stop());
    if (v > best) {
      best = v;
      last = j;
    }
  }

  ViterbiResult out;
  out.score = best;
  out.labels.resize(static_cast<std::size_t>(n));
  out.labels[n - 1] = last;
  for (Eigen::Index i = n - 1; i > 0; --i) out.labels[i - 1] = back(i, out.labels[i]);
  return out;
}

inline double log_partition(const EmissionMatrix& P, const TransitionMatrix& A) {
  detail::check_crf_inputs(P, A);
  return detail::close_partition(detail::forward_table(P, A), A);
}

struct Marginals {
  Mat unary;                  // n x k
  std::vector<Mat> pairwise;  // n - 1 matrices of k x k; pairwise[i](a, b) = p(y_i = a, y_{i+1} = b)
  double log_partition = 0.0;
};

inline Marginals marginals(const EmissionMatrix& P, const TransitionMatrix& A) {
  detail::check_crf_inputs(P, A);
  const auto n = P.rows();
  const int k = A.num_labels();
  const Mat alpha = detail::forward_table(P, A);
  const Mat beta = detail::backward_table(P, A);
  Marginals m;
  m.log_partition = detail::close_partition(alpha, A);
  if (!std::isfinite(m.log_partition)) {
    throw Error(ErrorKind::non_finite, "every label sequence is forbidden by the transition mask");
  }
  m.unary = ((alpha + beta).array() - m.log_partition).exp().matrix();
  m.pairwise.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    Mat pw(k, k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        pw(a, b) = std::exp(alpha(i, a) + A(a, b) + P(i + 1, b) + beta(i + 1, b) - m.log_partition);
      }
    }
    m.pairwise.push_back(std::move(pw));
  }
  return m;
}

struct NllResult {
  double loss = 0.0;
  Mat d_emissions;    // n x k
  Mat d_transitions;  // (k+2) x (k+2); zero on masked entries
};

// Negative log-likelihood of y under the CRF and its gradients.
inline NllResult nll_and_grad(const EmissionMatrix& P, const TransitionMatrix& A, std::span<const int> y) {
  const double gold = sequence_score(P, A, y);
  const auto m = marginals(P, A);
  const auto n = P.rows();
  const int k = A.num_labels();

  NllResult r;
  r.loss = std::max(0.0, m.log_partition - gold);
  r.d_emissions = m.unary;
  for (Eigen::Index i = 0; i < n; ++i) r.d_emissions(i, y[i]) -= 1.0;

  r.d_transitions = Mat::Zero(k + 2, k + 2);
  for (const auto& pw : m.pairwise) r.d_transitions.topLeftCorner(k, k) += pw;
  for (Eigen::Index i = 0; i + 1 < n; ++i) r.d_transitions(y[i], y[i + 1]) -= 1.0;
  for (int j = 0; j < k; ++j) {
    r.d_transitions(A.start(), j) = m.unary(0, j);
    r.d_transitions(j, A.stop()) = m.unary(n - 1, j);
  }
  r.d_transitions(A.start(), y[0]) -= 1.0;
  r.d_transitions(y[n - 1], A.stop()) -= 1.0;
  for (int a = 0; a < k + 2; ++a) {
    for (int b = 0; b < k + 2; ++b) {
      if (A(a, b) == kNegInf) r.d_transitions(a, b) = 0.0;
    }
  }
  return r;
}

}  // namespace lifelog
