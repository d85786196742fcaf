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

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lifelog/core_types.hpp"
#include "lifelog/timeline.hpp"

namespace lifelog {

enum class Fluent { hunger = 0, thirst = 1, fatigue = 2 };

inline constexpr int kNumFluents = 3;
inline constexpr std::array<std::string_view, kNumFluents> kFluentNames = {"hunger", "thirst", "fatigue"};

struct FluentParams {
  // Hours after a reset at which the fluent reaches 0.5.
  std::array<double, kNumFluents> alpha_hours = {5.0, 2.0, 1.0};
  double frames_per_hour = 1200.0;
  // Activities that reset each fluent to zero.
  std::array<std::vector<Activity>, kNumFluents> reset_sets = {
      std::vector<Activity>{Activity::eating}, std::vector<Activity>{Activity::drinking},
      std::vector<Activity>{Activity::resting}};
  // Virtual reset shared by all fluents at the start of the day. Must be <= 0, so a
  // negative value places it before the first frame.
  int initial_reset_idx = 0;

  static FluentParams for_interval(double frame_interval_s) {
    FluentParams p;
    p.frames_per_hour = 3600.0 / frame_interval_s;
    return p;
  }

  double alpha(Fluent f) const { return alpha_hours[static_cast<int>(f)]; }

  bool resets(Fluent f, Activity a) const {
    for (auto r : reset_sets[static_cast<int>(f)]) {
      if (r == a) return true;
    }
    return false;
  }

  void validate() const {
    for (int f = 0; f < kNumFluents; ++f) {
      if (!(alpha_hours[f] > 0.0)) throw Error(ErrorKind::invalid_argument, "fluent alphas must be positive");
      if (reset_sets[f].empty()) {
        throw Error(ErrorKind::invalid_argument, "fluent " + std::string(kFluentNames[f]) + " has no resetting activity");
      }
    }
    if (!(frames_per_hour > 0.0)) throw Error(ErrorKind::invalid_argument, "frames per hour must be positive");
    if (initial_reset_idx > 0) throw Error(ErrorKind::invalid_argument, "initial reset index must be <= 0");
  }
};

// Sigmoid of (hours since reset - alpha).
inline double fluent_value(long frame_idx, long reset_idx, double alpha_hours, double frames_per_hour) {
  if (frame_idx < reset_idx) {
    throw Error(ErrorKind::invalid_argument, "frame index " + std::to_string(frame_idx) +
                                                 " precedes its reset at " + std::to_string(reset_idx));
  }
  const double hours = static_cast<double>(frame_idx - reset_idx) / frames_per_hour;
  return 1.0 / (1.0 + std::exp(-(hours - alpha_hours)));
}

using FluentTriple = std::array<double, kNumFluents>;

struct FluentTrace {
  std::vector<FluentTriple> values;  // per frame: hunger, thirst, fatigue

  std::size_t size() const { return values.size(); }
  double at(std::size_t i, Fluent f) const { return values[i][static_cast<int>(f)]; }
};

inline FluentTrace fluent_trace(std::span<const Activity> labels, const FluentParams& p) {
  p.validate();
  FluentTrace trace;
  trace.values.resize(labels.size());
  std::array<long, kNumFluents> last_reset;
  last_reset.fill(p.initial_reset_idx);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int f = 0; f < kNumFluents; ++f) {
      if (p.resets(static_cast<Fluent>(f), labels[i])) {
        last_reset[f] = static_cast<long>(i);
        trace.values[i][f] = 0.0;
      } else {
        trace.values[i][f] = fluent_value(static_cast<long>(i), last_reset[f], p.alpha_hours[f], p.frames_per_hour);
      }
    }
  }
  return trace;
}

inline FluentTrace fluent_trace(const DayLog& log, const FluentParams& p) {
  const auto labels = log.labels();
  return fluent_trace(labels, p);
}

// 1 - mean over frames of the average fluent value.
inline double lifestyle_score(const FluentTrace& trace) {
  if (trace.values.empty()) throw Error(ErrorKind::empty_input, "lifestyle score of an empty trace");
  double sum = 0.0;
  for (const auto& v : trace.values) sum += v[0] + v[1] + v[2];
  return 1.0 - sum / (3.0 * static_cast<double>(trace.values.size()));
}

struct LifestyleReport {
  int day_id = 0;
  double lifestyle_score = 0.0;
  std::array<double, kNumFluents> fluent_means{};
  std::array<double, kNumGroups> group_seconds{};
  std::vector<ActivityInterval> intervals;
  std::string script;
  FluentTrace trace;
};

inline LifestyleReport analyze_day(const DayLog& log, const FluentParams& p, const GroupMap& gmap,
                                   double script_min_duration_s = 60.0) {
  const auto labels = log.labels();
  LifestyleReport r;
  r.day_id = log.day_id;
  r.trace = fluent_trace(labels, p);
  r.lifestyle_score = lifestyle_score(r.trace);
  for (const auto& v : r.trace.values) {
    for (int f = 0; f < kNumFluents; ++f) r.fluent_means[f] += v[f];
  }
  for (auto& m : r.fluent_means) m /= static_cast<double>(r.trace.size());
  for (auto a : labels) r.group_seconds[code_of(gmap(a))] += log.frame_interval_s;
  r.intervals = run_length_encode(labels, log.frame_interval_s, log.day_start_s);
  r.script = render_script(r.intervals, script_min_duration_s);
  return r;
}

}  // namespace lifelog
