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

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "lifelog/core_types.hpp"

namespace lifelog {

// Half-open frame span [start_idx, end_idx) of one activity; clocks are seconds since midnight.
struct ActivityInterval {
  Activity activity = Activity::using_computer;
  int start_idx = 0;
  int end_idx = 0;
  double start_clock = 0.0;
  double end_clock = 0.0;

  int length() const { return end_idx - start_idx; }
  double duration_s() const { return end_clock - start_clock; }

  bool operator==(const ActivityInterval&) const = default;
};

inline std::vector<ActivityInterval> run_length_encode(std::span<const Activity> labels,
                                                       double frame_interval_s = 3.0,
                                                       int day_start_s = 8 * 3600) {
  std::vector<ActivityInterval> out;
  const int n = static_cast<int>(labels.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || labels[i] != labels[start]) {
      out.push_back({labels[start], start, i, day_start_s + start * frame_interval_s,
                     day_start_s + i * frame_interval_s});
      start = i;
    }
  }
  return out;
}

inline std::vector<ActivityInterval> run_length_encode(const DayLog& log) {
  const auto labels = log.labels();
  return run_length_encode(labels, log.frame_interval_s, log.day_start_s);
}

inline std::vector<Activity> expand_intervals(std::span<const ActivityInterval> intervals) {
  std::vector<Activity> out;
  for (const auto& iv : intervals) {
    if (iv.end_idx <= iv.start_idx) {
      throw Error(ErrorKind::invalid_argument, "interval must have end_idx > start_idx");
    }
    if (static_cast<int>(out.size()) != iv.start_idx) {
      throw Error(ErrorKind::invalid_argument, "intervals are not contiguous");
    }
    out.insert(out.end(), iv.length(), iv.activity);
  }
  return out;
}

// 24-hour HH:MM, truncated to the minute.
inline std::string format_clock(double seconds_since_midnight) {
  const long total_min = static_cast<long>(std::floor(seconds_since_midnight / 60.0 + 1e-9));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02ld:%02ld", (total_min / 60) % 24, total_min % 60);
  return buf;
}

inline std::string_view script_verb(Activity a) {
  switch (a) {
    case Activity::using_computer: return "uses computer";
    case Activity::reading: return "reads";
    case Activity::using_phone: return "uses phone";
    case Activity::attending_class: return "attends class";
    case Activity::walking: return "walks";
    case Activity::resting: return "rests";
    case Activity::exercising_outdoor: return "exercises outdoors";
    case Activity::exercising_indoor: return "exercises indoors";
    case Activity::shopping: return "shops";
    case Activity::eating: return "eats";
    case Activity::drinking: return "drinks water";
    case Activity::social: return "socializes";
  }
  return "does something";
}

// One line per interval. Short drinking intervals are rendered without times.
inline std::string render_script(std::span<const ActivityInterval> intervals,
                                 double min_duration_s = 60.0) {
  std::string out;
  for (const auto& iv : intervals) {
    out += script_verb(iv.activity);
    if (!(iv.activity == Activity::drinking && iv.duration_s() < min_duration_s)) {
      out += " from ";
      out += format_clock(iv.start_clock);
      out += " to ";
      out += format_clock(iv.end_clock);
    }
    out += '\n';
  }
  return out;
}

}  // namespace lifelog
