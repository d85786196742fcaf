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
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lifelog/core_types.hpp"
#include "lifelog/eval_metrics.hpp"
#include "lifelog/fluents.hpp"
#include "lifelog/model.hpp"
#include "lifelog/random.hpp"
#include "lifelog/simulator.hpp"
#include "lifelog/training.hpp"

namespace lifelog::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// frames.jsonl

inline ordered_json frame_to_json(const FrameRecord& f) {
  ordered_json j;
  j["day"] = f.day_id;
  j["idx"] = f.idx;
  j["activity"] = f.activity ? ordered_json(std::string(name_of(*f.activity))) : ordered_json(nullptr);
  j["emissions"] = f.emissions ? ordered_json(*f.emissions) : ordered_json(nullptr);
  j["scene_feat"] = f.scene_feat ? ordered_json(*f.scene_feat) : ordered_json(nullptr);
  j["object_feats"] = f.object_feats ? ordered_json(*f.object_feats) : ordered_json(nullptr);
  return j;
}

inline void write_frames(std::ostream& out, std::span<const DayLog> days) {
  for (const auto& d : days) {
    for (const auto& f : d.frames) out << frame_to_json(f).dump() << '\n';
  }
}

inline FrameRecord frame_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "frame is not a JSON object");
  FrameRecord f;
  try {
    f.day_id = j.at("day").get<int>();
    f.idx = j.at("idx").get<int>();
    if (auto it = j.find("activity"); it != j.end() && !it->is_null()) f.activity = parse_activity(it->get<std::string>());
    if (auto it = j.find("emissions"); it != j.end() && !it->is_null()) f.emissions = it->get<std::vector<double>>();
    if (auto it = j.find("scene_feat"); it != j.end() && !it->is_null()) f.scene_feat = it->get<std::vector<double>>();
    if (auto it = j.find("object_feats"); it != j.end() && !it->is_null()) {
      f.object_feats = it->get<std::vector<std::vector<double>>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed frame: ") + e.what());
  }
  if (f.idx < 0) throw Error(ErrorKind::parse_error, "negative frame index");
  f.validate();
  return f;
}

// Groups frames by day (ascending day id) and orders each day by frame index.
inline std::vector<DayLog> read_frames(std::istream& in, const DayGeometry& geom = {}) {
  std::map<int, std::vector<FrameRecord>> by_day;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto f = frame_from_json(json::parse(line));
      by_day[f.day_id].push_back(std::move(f));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::vector<DayLog> days;
  for (auto& [day_id, frames] : by_day) {
    std::stable_sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) { return a.idx < b.idx; });
    DayLog d{day_id, geom.frame_interval_s, geom.day_start_s, std::move(frames)};
    d.validate();
    days.push_back(std::move(d));
  }
  return days;
}

inline std::vector<DayLog> read_frames_file(const std::filesystem::path& path, const DayGeometry& geom = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  return read_frames(in, geom);
}

inline void write_frames_file(const std::filesystem::path& path, std::span<const DayLog> days) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  write_frames(out, days);
}

// ---------------------------------------------------------------------------
// Model file: "LLBICRF\0", u32 version, u32 config length, config JSON, u32 tensor
// count, then per tensor: u32 name length, name, u32 rows, u32 cols, rows*cols f64
// in row-major order. All integers and floats little-endian.

inline constexpr char kModelMagic[8] = {'L', 'L', 'B', 'I', 'C', 'R', 'F', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error(ErrorKind::parse_error, "truncated model file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

inline std::string get_bytes(std::istream& in, std::uint32_t n) {
  if (n > (1u << 26)) throw Error(ErrorKind::parse_error, "implausible length in model file");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw Error(ErrorKind::parse_error, "truncated model file");
  return s;
}

}  // namespace detail

inline const char* input_mode_name(InputMode m) { return m == InputMode::features ? "features" : "emissions"; }

inline InputMode parse_input_mode(const std::string& s) {
  if (s == "emissions") return InputMode::emissions;
  if (s == "features") return InputMode::features;
  throw Error(ErrorKind::parse_error, "unknown input mode: " + s);
}

inline const char* pool_mode_name(PoolMode m) { return m == PoolMode::max ? "max" : "mean"; }

inline PoolMode parse_pool_mode(const std::string& s) {
  if (s == "mean") return PoolMode::mean;
  if (s == "max") return PoolMode::max;
  throw Error(ErrorKind::parse_error, "unknown pooling mode: " + s);
}

inline ordered_json model_config_to_json(const ModelConfig& c) {
  ordered_json j;
  j["input_mode"] = input_mode_name(c.input_mode);
  j["num_labels"] = c.num_labels;
  j["hidden_dim"] = c.hidden_dim;
  j["scene_dim"] = c.scene_dim;
  j["object_dim"] = c.object_dim;
  j["scene_out"] = c.scene_out;
  j["object_out"] = c.object_out;
  j["fused_out"] = c.fused_out;
  j["pool"] = pool_mode_name(c.pool);
  return j;
}

inline ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  try {
    c.input_mode = parse_input_mode(j.at("input_mode").get<std::string>());
    c.num_labels = j.at("num_labels").get<int>();
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.scene_dim = j.at("scene_dim").get<int>();
    c.object_dim = j.at("object_dim").get<int>();
    c.scene_out = j.at("scene_out").get<int>();
    c.object_out = j.at("object_out").get<int>();
    c.fused_out = j.at("fused_out").get<int>();
    c.pool = parse_pool_mode(j.at("pool").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed model config: ") + e.what());
  }
  c.validate();
  return c;
}

inline void write_model(std::ostream& out, const BilstmCrfModel& model) {
  out.write(kModelMagic, sizeof kModelMagic);
  detail::put_le<std::uint32_t>(out, kModelVersion);
  const std::string cfg = model_config_to_json(model.config).dump();
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.size()));
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
  std::uint32_t count = 0;
  BilstmCrfModel::visit([&](const std::string&, const auto&) { ++count; }, model);
  detail::put_le<std::uint32_t>(out, count);
  BilstmCrfModel::visit(
      [&](const std::string& name, const auto& t) {
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows()));
        detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols()));
        for (Eigen::Index r = 0; r < t.rows(); ++r) {
          for (Eigen::Index c = 0; c < t.cols(); ++c) detail::put_le<double>(out, t(r, c));
        }
      },
      model);
}

inline BilstmCrfModel read_model(std::istream& in) {
  char magic[sizeof kModelMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw Error(ErrorKind::parse_error, "not a model file (bad magic)");
  }
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kModelVersion) {
    throw Error(ErrorKind::parse_error, "unsupported model format version " + std::to_string(version));
  }
  const auto cfg_text = detail::get_bytes(in, detail::get_le<std::uint32_t>(in));
  ModelConfig cfg;
  try {
    cfg = model_config_from_json(json::parse(cfg_text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed model config: ") + e.what());
  }
  auto model = BilstmCrfModel::zeros(cfg);
  std::uint32_t expected = 0;
  BilstmCrfModel::visit([&](const std::string&, const auto&) { ++expected; }, model);
  const auto count = detail::get_le<std::uint32_t>(in);
  if (count != expected) throw Error(ErrorKind::parse_error, "model file tensor count does not match its config");
  BilstmCrfModel::visit(
      [&](const std::string& name, auto& t) {
        const auto stored = detail::get_bytes(in, detail::get_le<std::uint32_t>(in));
        if (stored != name) throw Error(ErrorKind::parse_error, "expected tensor '" + name + "', found '" + stored + "'");
        const auto rows = detail::get_le<std::uint32_t>(in);
        const auto cols = detail::get_le<std::uint32_t>(in);
        if (rows != t.rows() || cols != t.cols()) {
          throw Error(ErrorKind::parse_error, "tensor '" + name + "' has unexpected shape");
        }
        for (Eigen::Index r = 0; r < t.rows(); ++r) {
          for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = detail::get_le<double>(in);
        }
      },
      model);
  model.transitions.validate();
  return model;
}

inline void write_model_file(const std::filesystem::path& path, const BilstmCrfModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  write_model(out, model);
}

inline BilstmCrfModel read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  return read_model(in);
}

// ---------------------------------------------------------------------------
// Run configuration: flat JSON object; every key optional.

struct TransitionPrior {
  Activity from = Activity::using_computer;
  Activity to = Activity::using_computer;
  double score = 0.0;
};

struct RunConfig {
  DayGeometry geometry;
  std::array<double, kNumFluents> alpha_hours = {5.0, 2.0, 1.0};
  std::array<std::vector<Activity>, kNumFluents> reset_sets = FluentParams{}.reset_sets;
  int initial_reset_idx = 0;
  GroupMap group_map = GroupMap::defaults();
  int window = kDefaultWindow;
  DecodeMode decode_mode = DecodeMode::window;
  TrainOptions train;
  ModelConfig model;
  std::vector<TransitionPrior> transition_priors;
  double script_min_duration_s = 120.0;

  FluentParams fluent_params() const {
    FluentParams p = FluentParams::for_interval(geometry.frame_interval_s);
    p.alpha_hours = alpha_hours;
    p.reset_sets = reset_sets;
    p.initial_reset_idx = initial_reset_idx;
    p.validate();
    return p;
  }

  void apply_priors(TransitionMatrix& t) const {
    for (const auto& pr : transition_priors) t(code_of(pr.from), code_of(pr.to)) = pr.score;
  }
};

inline int parse_clock(const std::string& s) {
  int h = 0, m = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &extra) != 2 || h < 0 || h > 24 || m < 0 || m > 59) {
    throw Error(ErrorKind::parse_error, "clock must be HH:MM, got '" + s + "'");
  }
  return h * 3600 + m * 60;
}

inline const char* decode_mode_name(DecodeMode m) { return m == DecodeMode::whole_day ? "whole_day" : "window"; }

inline DecodeMode parse_decode_mode(const std::string& s) {
  if (s == "window") return DecodeMode::window;
  if (s == "whole_day" || s == "whole-day") return DecodeMode::whole_day;
  throw Error(ErrorKind::parse_error, "unknown decode mode: " + s);
}

inline double parse_score(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "-inf") return kNegInf;
  throw Error(ErrorKind::parse_error, "transition prior score must be a number or \"-inf\"");
}

inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "frame_interval_s") c.geometry.frame_interval_s = v.get<double>();
      else if (key == "day_start") c.geometry.day_start_s = parse_clock(v.get<std::string>());
      else if (key == "day_end") c.geometry.day_end_s = parse_clock(v.get<std::string>());
      else if (key == "alpha_hunger") c.alpha_hours[0] = v.get<double>();
      else if (key == "alpha_thirst") c.alpha_hours[1] = v.get<double>();
      else if (key == "alpha_fatigue") c.alpha_hours[2] = v.get<double>();
      else if (key == "initial_reset_idx") c.initial_reset_idx = v.get<int>();
      else if (key == "window") c.window = v.get<int>();
      else if (key == "decode_mode") c.decode_mode = parse_decode_mode(v.get<std::string>());
      else if (key == "learning_rate") c.train.learning_rate = v.get<double>();
      else if (key == "epochs") c.train.epochs = v.get<int>();
      else if (key == "batch_size") c.train.batch_size = v.get<int>();
      else if (key == "clip_norm") c.train.clip_norm = v.get<double>();
      else if (key == "shuffle") c.train.shuffle = v.get<bool>();
      else if (key == "seed") c.train.seed = v.get<std::uint64_t>();
      else if (key == "hidden_dim") c.model.hidden_dim = v.get<int>();
      else if (key == "input_mode") c.model.input_mode = parse_input_mode(v.get<std::string>());
      else if (key == "pool") c.model.pool = parse_pool_mode(v.get<std::string>());
      else if (key == "fc1_dim") c.model.scene_out = v.get<int>();
      else if (key == "fc2_dim") c.model.object_out = v.get<int>();
      else if (key == "fc3_dim") c.model.fused_out = v.get<int>();
      else if (key == "script_min_duration_s") c.script_min_duration_s = v.get<double>();
      else if (key == "group_map") {
        auto table = GroupMap::defaults().table();
        for (const auto& [a, g] : v.items()) table[code_of(parse_activity(a))] = parse_group(g.get<std::string>());
        c.group_map = GroupMap(table);
      } else if (key == "reset_map") {
        for (const auto& [fl, acts] : v.items()) {
          const auto pos = std::find(kFluentNames.begin(), kFluentNames.end(), fl);
          if (pos == kFluentNames.end()) throw Error(ErrorKind::parse_error, "unknown fluent: " + fl);
          std::vector<Activity> set;
          for (const auto& a : acts) set.push_back(parse_activity(a.get<std::string>()));
          c.reset_sets[pos - kFluentNames.begin()] = std::move(set);
        }
      } else if (key == "transition_priors") {
        for (const auto& p : v) {
          c.transition_priors.push_back({parse_activity(p.at("from").get<std::string>()),
                                         parse_activity(p.at("to").get<std::string>()), parse_score(p.at("score"))});
        }
      } else {
        throw Error(ErrorKind::parse_error, "unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed config: ") + e.what());
  }
  c.geometry.validate();
  c.fluent_params();
  if (c.window < 1) throw Error(ErrorKind::invalid_argument, "window must be positive");
  return c;
}

inline RunConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("config is not valid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Simulation spec: {"template": "healthy" | "unhealthy" | "week"} or
// {"days": [{"day": 0, "blocks": [{"activity": "eating", "minutes": 20}], "fill": "resting"}]},
// plus optional seed, margin, sigma, features, scene_dim, object_dim, objects_per_frame,
// feature_sigma, feature_seed.

inline std::vector<ScheduleSpec> template_specs(const std::string& name, std::uint64_t seed) {
  if (name == "healthy") return {templates::healthy_day(0, seed)};
  if (name == "unhealthy") return {templates::unhealthy_day(0, seed)};
  if (name == "week") return templates::week(seed);
  throw Error(ErrorKind::invalid_argument, "unknown template: " + name);
}

inline std::vector<ScheduleSpec> specs_from_json(const json& j, std::uint64_t seed, const DayGeometry& geom) {
  std::vector<ScheduleSpec> specs;
  try {
    const auto s = j.value("seed", seed);
    if (j.contains("template")) {
      specs = template_specs(j.at("template").get<std::string>(), s);
    } else if (j.contains("days")) {
      for (const auto& d : j.at("days")) {
        ScheduleSpec spec;
        spec.day_id = d.at("day").get<int>();
        spec.seed = s;
        for (const auto& b : d.at("blocks")) {
          spec.blocks.push_back({parse_activity(b.at("activity").get<std::string>()), b.at("minutes").get<double>()});
        }
        if (d.contains("fill")) spec.fill = parse_activity(d.at("fill").get<std::string>());
        specs.push_back(std::move(spec));
      }
    } else {
      throw Error(ErrorKind::parse_error, "simulation spec needs 'template' or 'days'");
    }
    for (auto& spec : specs) {
      spec.geometry = geom;
      spec.margin = j.value("margin", spec.margin);
      spec.sigma = j.value("sigma", spec.sigma);
      if (j.contains("features")) {
        const auto f = j.at("features").get<std::string>();
        if (f == "synthetic") spec.features = FeatureMode::synthetic;
        else if (f == "none") spec.features = FeatureMode::none;
        else throw Error(ErrorKind::parse_error, "unknown feature mode: " + f);
      }
      spec.scene_dim = j.value("scene_dim", spec.scene_dim);
      spec.object_dim = j.value("object_dim", spec.object_dim);
      spec.objects_per_frame = j.value("objects_per_frame", spec.objects_per_frame);
      spec.feature_sigma = j.value("feature_sigma", spec.feature_sigma);
      spec.feature_seed = j.value("feature_seed", spec.feature_seed);
      spec.validate();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed simulation spec: ") + e.what());
  }
  return specs;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string format_double(double v, int precision = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline void write_fluents_csv(std::ostream& out, std::span<const LifestyleReport> reports) {
  out << "day,idx,hunger,thirst,fatigue\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const auto& v = r.trace.values[i];
      out << r.day_id << ',' << i << ',' << format_double(v[0]) << ',' << format_double(v[1]) << ','
          << format_double(v[2]) << '\n';
    }
  }
}

inline ordered_json report_to_json(const LifestyleReport& r) {
  ordered_json j;
  j["day"] = r.day_id;
  j["lifestyle_score"] = r.lifestyle_score;
  ordered_json means;
  for (int f = 0; f < kNumFluents; ++f) means[std::string(kFluentNames[f])] = r.fluent_means[f];
  j["fluent_means"] = means;
  ordered_json groups;
  for (int g = 0; g < kNumGroups; ++g) groups[std::string(kGroupNames[g])] = r.group_seconds[g];
  j["group_seconds"] = groups;
  ordered_json ivs = ordered_json::array();
  for (const auto& iv : r.intervals) {
    ordered_json o;
    o["activity"] = std::string(name_of(iv.activity));
    o["start_idx"] = iv.start_idx;
    o["end_idx"] = iv.end_idx;
    o["start"] = format_clock(iv.start_clock);
    o["end"] = format_clock(iv.end_clock);
    ivs.push_back(std::move(o));
  }
  j["intervals"] = std::move(ivs);
  return j;
}

inline void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm, std::span<const std::string_view> names) {
  out << "truth\\pred";
  for (auto n : names) out << ',' << n;
  out << '\n';
  for (int t = 0; t < cm.classes(); ++t) {
    out << names[t];
    for (int p = 0; p < cm.classes(); ++p) out << ',' << cm.at(t, p);
    out << '\n';
  }
}

inline ordered_json metrics_to_json(const MacroMetrics& m, std::span<const std::string_view> names) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["macro_precision"] = m.macro_precision;
  j["macro_recall"] = m.macro_recall;
  j["macro_f1"] = m.macro_f1;
  j["macro_f1_of_means"] = m.macro_f1_of_means;
  ordered_json per = ordered_json::array();
  for (std::size_t c = 0; c < names.size(); ++c) {
    ordered_json o;
    o["class"] = std::string(names[c]);
    o["precision"] = m.precision[c];
    o["recall"] = m.recall[c];
    o["f1"] = m.f1[c];
    per.push_back(std::move(o));
  }
  j["per_class"] = std::move(per);
  return j;
}

}  // namespace lifelog::io
