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
#include <span>
#include <string>
#include <vector>

#include "lifelog/core_types.hpp"
#include "lifelog/random.hpp"

namespace lifelog {

struct ScheduleBlock {
  Activity activity = Activity::resting;
  double minutes = 0.0;

  bool operator==(const ScheduleBlock&) const = default;
};

enum class FeatureMode { none, synthetic };

// One synthetic day. Emission rows are margin * onehot(truth) + sigma * N(0, I).
// Synthetic features are per-activity Gaussian clusters; the cluster centers come
// from feature_seed and are shared by every day generated with it.
struct ScheduleSpec {
  int day_id = 0;
  std::vector<ScheduleBlock> blocks;
  Activity fill = Activity::resting;  // covers any time after the last block
  double margin = 4.0;
  double sigma = 1.0;
  FeatureMode features = FeatureMode::none;
  int scene_dim = 16;
  int object_dim = 8;
  int objects_per_frame = 2;
  double feature_sigma = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t feature_seed = 7;
  DayGeometry geometry;

  void validate() const {
    geometry.validate();
    for (const auto& b : blocks) {
      if (!(b.minutes > 0.0)) throw Error(ErrorKind::invalid_argument, "schedule block durations must be positive");
    }
    if (!(margin >= 0.0) || !(sigma >= 0.0) || !(feature_sigma >= 0.0)) {
      throw Error(ErrorKind::invalid_argument, "noise parameters must be non-negative");
    }
    if (features == FeatureMode::synthetic && (scene_dim < 1 || object_dim < 1 || objects_per_frame < 0)) {
      throw Error(ErrorKind::invalid_argument, "synthetic features need positive dimensions");
    }
  }
};

// Frame-level labels of the schedule: blocks in order, then the fill activity.
inline std::vector<Activity> expand_schedule(const ScheduleSpec& spec) {
  spec.validate();
  const int n = spec.geometry.frames_per_day();
  std::vector<Activity> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (const auto& b : spec.blocks) {
    const auto frames = std::lround(b.minutes * 60.0 / spec.geometry.frame_interval_s);
    if (static_cast<long>(labels.size()) + frames > n) {
      throw Error(ErrorKind::schedule_overflow, "schedule for day " + std::to_string(spec.day_id) +
                                                    " exceeds the day length of " + std::to_string(n) + " frames");
    }
    labels.insert(labels.end(), static_cast<std::size_t>(frames), b.activity);
  }
  labels.resize(static_cast<std::size_t>(n), spec.fill);
  return labels;
}

struct FeatureCenters {
  std::vector<std::vector<double>> scene;   // per activity
  std::vector<std::vector<double>> object;  // per activity
};

inline FeatureCenters feature_centers(const ScheduleSpec& spec) {
  Rng rng(Rng::derive(spec.feature_seed, 0xFEA7));
  FeatureCenters c;
  for (int a = 0; a < kNumActivities; ++a) {
    std::vector<double> s(static_cast<std::size_t>(spec.scene_dim));
    for (auto& v : s) v = rng.normal();
    c.scene.push_back(std::move(s));
  }
  for (int a = 0; a < kNumActivities; ++a) {
    std::vector<double> o(static_cast<std::size_t>(spec.object_dim));
    for (auto& v : o) v = rng.normal();
    c.object.push_back(std::move(o));
  }
  return c;
}

// Draw order per frame: 12 emission noises in label-code order, then scene_dim scene
// noises, then objects_per_frame * object_dim object noises. The generator is seeded
// with Rng::derive(seed, day_id), so days with equal seeds still get distinct streams.
inline DayLog generate_day(const ScheduleSpec& spec) {
  const auto labels = expand_schedule(spec);
  Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(spec.day_id)));
  FeatureCenters centers;
  if (spec.features == FeatureMode::synthetic) centers = feature_centers(spec);

  DayLog log{spec.day_id, spec.geometry.frame_interval_s, spec.geometry.day_start_s, {}};
  log.frames.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    FrameRecord f;
    f.day_id = spec.day_id;
    f.idx = static_cast<int>(i);
    f.activity = labels[i];
    std::vector<double> e(kNumActivities);
    for (int j = 0; j < kNumActivities; ++j) {
      const double noise = spec.sigma * rng.normal();
      e[j] = (j == code_of(labels[i]) ? spec.margin : 0.0) + noise;
    }
    f.emissions = std::move(e);
    if (spec.features == FeatureMode::synthetic) {
      const auto a = static_cast<std::size_t>(code_of(labels[i]));
      std::vector<double> scene(centers.scene[a]);
      for (auto& v : scene) v += spec.feature_sigma * rng.normal();
      f.scene_feat = std::move(scene);
      std::vector<std::vector<double>> objects;
      for (int o = 0; o < spec.objects_per_frame; ++o) {
        std::vector<double> obj(centers.object[a]);
        for (auto& v : obj) v += spec.feature_sigma * rng.normal();
        objects.push_back(std::move(obj));
      }
      f.object_feats = std::move(objects);
    }
    log.frames.push_back(std::move(f));
  }
  return log;
}

inline std::vector<DayLog> generate_week(std::span<const ScheduleSpec> specs) {
  if (specs.size() != 7) {
    throw Error(ErrorKind::invalid_argument, "a week needs exactly 7 schedules, got " + std::to_string(specs.size()));
  }
  std::vector<DayLog> days;
  days.reserve(7);
  for (const auto& s : specs) days.push_back(generate_day(s));
  return days;
}

namespace templates {

// Work in short blocks with drinks and rests between, lunch plus a snack, some exercise.
// Uses all twelve activities.
inline std::vector<ScheduleBlock> healthy_blocks() {
  using A = Activity;
  return {{A::walking, 15},           {A::attending_class, 45}, {A::using_computer, 50},    {A::drinking, 1},
          {A::resting, 9},            {A::reading, 40},         {A::using_phone, 5},        {A::drinking, 1},
          {A::resting, 14},           {A::using_computer, 50},  {A::walking, 10},           {A::eating, 30},
          {A::social, 30},            {A::resting, 20},         {A::drinking, 1},           {A::using_computer, 49},
          {A::resting, 10},           {A::reading, 40},         {A::drinking, 1},           {A::exercising_indoor, 44},
          {A::resting, 10},           {A::eating, 10},          {A::drinking, 1},           {A::shopping, 24},
          {A::walking, 10},           {A::exercising_outdoor, 40}, {A::drinking, 1},        {A::resting, 9},
          {A::using_computer, 29},    {A::drinking, 1}};
}

// Uninterrupted computer work with a single short meal.
inline std::vector<ScheduleBlock> unhealthy_blocks() {
  using A = Activity;
  return {{A::using_computer, 240}, {A::eating, 15}, {A::using_computer, 345}};
}

inline ScheduleSpec healthy_day(int day_id = 0, std::uint64_t seed = 0) {
  ScheduleSpec s;
  s.day_id = day_id;
  s.seed = seed;
  s.blocks = healthy_blocks();
  return s;
}

inline ScheduleSpec unhealthy_day(int day_id = 0, std::uint64_t seed = 0) {
  ScheduleSpec s;
  s.day_id = day_id;
  s.seed = seed;
  s.blocks = unhealthy_blocks();
  return s;
}

// Seven days: rotations of the healthy schedule, with day 3 replaced by the sedentary one.
inline std::vector<ScheduleSpec> week(std::uint64_t seed = 0) {
  std::vector<ScheduleSpec> specs;
  for (int d = 0; d < 7; ++d) {
    if (d == 3) {
      specs.push_back(unhealthy_day(d, seed));
      continue;
    }
    auto s = healthy_day(d, seed);
    std::rotate(s.blocks.begin(), s.blocks.begin() + (3 * d) % static_cast<long>(s.blocks.size()), s.blocks.end());
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace templates

}  // namespace lifelog
