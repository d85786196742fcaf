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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lifelog/error.hpp"

namespace lifelog {

inline constexpr int kNumActivities = 12;
inline constexpr int kNumGroups = 5;

// Integer codes are part of the serialized formats and must not be reordered.
enum class Activity : std::uint8_t {
  using_computer = 0,
  reading = 1,
  using_phone = 2,
  attending_class = 3,
  walking = 4,
  resting = 5,
  exercising_outdoor = 6,
  exercising_indoor = 7,
  shopping = 8,
  eating = 9,
  drinking = 10,
  social = 11,
};

enum class ActivityGroup : std::uint8_t {
  sedentary = 0,
  food = 1,
  motion = 2,
  rest = 3,
  social_errands = 4,
};

inline constexpr std::array<std::string_view, kNumActivities> kActivityNames = {
    "using_computer", "reading",           "using_phone",       "attending_class",
    "walking",        "resting",           "exercising_outdoor", "exercising_indoor",
    "shopping",       "eating",            "drinking",          "social"};

inline constexpr std::array<std::string_view, kNumGroups> kGroupNames = {
    "sedentary", "food", "motion", "rest", "social_errands"};

constexpr int code_of(Activity a) { return static_cast<int>(a); }
constexpr int code_of(ActivityGroup g) { return static_cast<int>(g); }

inline Activity activity_from_code(int code) {
  if (code < 0 || code >= kNumActivities) {
    throw Error(ErrorKind::out_of_range, "activity code out of range: " + std::to_string(code));
  }
  return static_cast<Activity>(code);
}

inline ActivityGroup group_from_code(int code) {
  if (code < 0 || code >= kNumGroups) {
    throw Error(ErrorKind::out_of_range, "group code out of range: " + std::to_string(code));
  }
  return static_cast<ActivityGroup>(code);
}

inline std::string_view name_of(Activity a) { return kActivityNames[code_of(a)]; }
inline std::string_view name_of(ActivityGroup g) { return kGroupNames[code_of(g)]; }

inline Activity parse_activity(std::string_view name) {
  for (int c = 0; c < kNumActivities; ++c) {
    if (kActivityNames[c] == name) return static_cast<Activity>(c);
  }
  throw Error(ErrorKind::parse_error, "unknown activity: " + std::string(name));
}

inline ActivityGroup parse_group(std::string_view name) {
  for (int c = 0; c < kNumGroups; ++c) {
    if (kGroupNames[c] == name) return static_cast<ActivityGroup>(c);
  }
  throw Error(ErrorKind::parse_error, "unknown activity group: " + std::string(name));
}

// Total, surjective map from the 12 activities onto the 5 groups.
class GroupMap {
 public:
  explicit GroupMap(const std::array<ActivityGroup, kNumActivities>& table) : table_(table) {
    std::array<bool, kNumGroups> hit{};
    for (auto g : table_) {
      if (code_of(g) >= kNumGroups) throw Error(ErrorKind::out_of_range, "group code out of range");
      hit[code_of(g)] = true;
    }
    for (int g = 0; g < kNumGroups; ++g) {
      if (!hit[g]) {
        throw Error(ErrorKind::invalid_argument,
                    "group map leaves group '" + std::string(kGroupNames[g]) + "' without members");
      }
    }
  }

  static GroupMap defaults() {
    using G = ActivityGroup;
    return GroupMap({G::sedentary, G::sedentary, G::sedentary, G::sedentary,  // computer..class
                     G::motion, G::rest, G::motion, G::motion,                // walking..indoor
                     G::social_errands, G::food, G::food, G::social_errands});
  }

  ActivityGroup operator()(Activity a) const { return table_[code_of(a)]; }
  const std::array<ActivityGroup, kNumActivities>& table() const { return table_; }

  bool operator==(const GroupMap&) const = default;

 private:
  std::array<ActivityGroup, kNumActivities> table_;
};

inline ActivityGroup group_of(Activity label, const GroupMap& map) { return map(label); }

struct FrameRecord {
  int day_id = 0;
  int idx = 0;
  std::optional<Activity> activity;
  std::optional<std::vector<double>> emissions;
  std::optional<std::vector<double>> scene_feat;
  std::optional<std::vector<std::vector<double>>> object_feats;

  void validate() const {
    if (!activity && !emissions && !scene_feat) {
      throw Error(ErrorKind::invalid_argument,
                  "frame " + std::to_string(idx) + " of day " + std::to_string(day_id) +
                      " carries no activity, emissions or scene feature");
    }
    if (emissions && emissions->size() != static_cast<std::size_t>(kNumActivities)) {
      throw Error(ErrorKind::shape_mismatch, "frame " + std::to_string(idx) + " has " +
                                                 std::to_string(emissions->size()) +
                                                 " emission scores, expected 12");
    }
  }

  bool operator==(const FrameRecord&) const = default;
};

// Day geometry. Frame index is the canonical time axis; clock values derive from it.
struct DayGeometry {
  double frame_interval_s = 3.0;
  int day_start_s = 8 * 3600;
  int day_end_s = 18 * 3600;

  int frames_per_day() const {
    return static_cast<int>(std::lround((day_end_s - day_start_s) / frame_interval_s));
  }
  double frames_per_hour() const { return 3600.0 / frame_interval_s; }

  void validate() const {
    if (!(frame_interval_s > 0.0) || !std::isfinite(frame_interval_s)) {
      throw Error(ErrorKind::invalid_argument, "frame interval must be positive");
    }
    if (day_end_s <= day_start_s) {
      throw Error(ErrorKind::invalid_argument, "day end must follow day start");
    }
  }

  bool operator==(const DayGeometry&) const = default;
};

struct DayLog {
  int day_id = 0;
  double frame_interval_s = 3.0;
  int day_start_s = 8 * 3600;
  std::vector<FrameRecord> frames;

  std::size_t size() const { return frames.size(); }

  double clock_time(int idx) const { return day_start_s + idx * frame_interval_s; }

  void validate() const {
    if (!(frame_interval_s > 0.0)) throw Error(ErrorKind::invalid_argument, "frame interval must be positive");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      if (f.idx != static_cast<int>(i)) {
        throw Error(ErrorKind::invalid_argument, "day " + std::to_string(day_id) +
                                                     ": frame indices are not contiguous at position " +
                                                     std::to_string(i));
      }
      if (f.day_id != day_id) {
        throw Error(ErrorKind::invalid_argument, "frame " + std::to_string(i) + " belongs to day " +
                                                     std::to_string(f.day_id) + ", not " +
                                                     std::to_string(day_id));
      }
      f.validate();
    }
  }

  bool fully_labeled() const {
    for (const auto& f : frames) {
      if (!f.activity) return false;
    }
    return true;
  }

  // Throws missing_label on the first unlabeled frame.
  std::vector<Activity> labels() const {
    std::vector<Activity> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
      if (!f.activity) {
        throw Error(ErrorKind::missing_label, "day " + std::to_string(day_id) + " frame " +
                                                  std::to_string(f.idx) + " has no activity");
      }
      out.push_back(*f.activity);
    }
    return out;
  }

  bool operator==(const DayLog&) const = default;
};

// Builds a labeled day from a label sequence with the given geometry.
inline DayLog make_labeled_day(int day_id, const std::vector<Activity>& labels,
                               const DayGeometry& geom = {}) {
  DayLog log{day_id, geom.frame_interval_s, geom.day_start_s, {}};
  log.frames.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    FrameRecord f;
    f.day_id = day_id;
    f.idx = static_cast<int>(i);
    f.activity = labels[i];
    log.frames.push_back(std::move(f));
  }
  return log;
}

}  // namespace lifelog
