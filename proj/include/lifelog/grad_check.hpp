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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lifelog {

struct TensorGradCheck {
  std::string name;
  std::size_t entries = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<TensorGradCheck> tensors;
  double max_rel_error = 0.0;
  std::string worst_tensor;
  double tolerance = 0.0;

  bool passed() const { return max_rel_error < tolerance; }
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor so entries whose true gradient is zero compare absolutely.
  double abs_floor = 1e-6;
};

// Compares analytic gradients against central differences of loss, entry by entry.
// Params must expose a static visit(f, params...) enumerating its tensors. Non-finite
// parameter entries (masked transitions) are skipped.
template <class Params, class LossFn>
GradCheckReport grad_check(Params& params, const Params& analytic, LossFn&& loss, const GradCheckOptions& opts = {}) {
  GradCheckReport report;
  report.tolerance = opts.tolerance;
  Params::visit(
      [&](const std::string& name, auto& tensor, const auto& grad) {
        TensorGradCheck tc{name, static_cast<std::size_t>(tensor.size()), 0.0};
        for (Eigen::Index e = 0; e < tensor.size(); ++e) {
          double& w = tensor.data()[e];
          if (!std::isfinite(w)) continue;
          const double saved = w;
          w = saved + opts.step;
          const double up = loss(std::as_const(params));
          w = saved - opts.step;
          const double down = loss(std::as_const(params));
          w = saved;
          const double numeric = (up - down) / (2.0 * opts.step);
          const double a = grad.data()[e];
          const double denom = std::max({std::abs(a), std::abs(numeric), opts.abs_floor});
          tc.max_rel_error = std::max(tc.max_rel_error, std::abs(a - numeric) / denom);
        }
        if (tc.max_rel_error >= report.max_rel_error) {
          report.max_rel_error = tc.max_rel_error;
          report.worst_tensor = name;
        }
        report.tensors.push_back(std::move(tc));
      },
      params, analytic);
  return report;
}

}  // namespace lifelog
