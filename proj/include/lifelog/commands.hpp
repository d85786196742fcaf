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

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lifelog/eval_metrics.hpp"
#include "lifelog/fluents.hpp"
#include "lifelog/io.hpp"
#include "lifelog/simulator.hpp"
#include "lifelog/training.hpp"

// Implementations of the CLI subcommands. Each throws lifelog::Error on bad input.
namespace lifelog::commands {

namespace fs = std::filesystem;

inline io::RunConfig load_config(const std::optional<fs::path>& path) {
  return path ? io::read_config_file(*path) : io::RunConfig{};
}

inline std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  return out;
}

template <class T, class F>
std::vector<T> map_days(const std::vector<DayLog>& days, F&& f) {
  std::vector<std::future<T>> jobs;
  jobs.reserve(days.size());
  for (const auto& d : days) jobs.push_back(std::async(std::launch::async, [&f, &d] { return f(d); }));
  std::vector<T> out;
  out.reserve(days.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

struct SimulateArgs {
  std::optional<fs::path> spec_file;
  std::string template_name = "healthy";
  std::optional<fs::path> config;
  std::uint64_t seed = 0;
  fs::path output = "frames.jsonl";
};

inline std::vector<DayLog> simulate(const SimulateArgs& a, std::ostream& log) {
  const auto cfg = load_config(a.config);
  io::json spec = io::json{{"template", a.template_name}};
  if (a.spec_file) {
    std::ifstream in(*a.spec_file);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + a.spec_file->string());
    try {
      spec = io::json::parse(in);
    } catch (const io::json::exception& e) {
      throw Error(ErrorKind::parse_error, std::string("simulation spec is not valid JSON: ") + e.what());
    }
  }
  const auto specs = io::specs_from_json(spec, a.seed, cfg.geometry);
  std::vector<DayLog> days;
  for (const auto& s : specs) days.push_back(generate_day(s));
  {
    auto out = open_output(a.output);
    io::write_frames(out, days);
  }
  io::ordered_json meta;
  meta["rng"] = Rng::kAlgorithm;
  meta["seed"] = spec.value("seed", a.seed);
  meta["days"] = days.size();
  meta["spec"] = spec;
  auto mout = open_output(a.output.string() + ".meta.json");
  mout << meta.dump(2) << '\n';
  std::size_t frames = 0;
  for (const auto& d : days) frames += d.size();
  log << "wrote " << days.size() << " day(s), " << frames << " frames to " << a.output.string() << '\n';
  return days;
}

struct TrainArgs {
  fs::path input;
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  fs::path model_out = "model.bin";
};

inline TrainingTrace train(const TrainArgs& a, std::ostream& log) {
  auto cfg = load_config(a.config);
  if (a.seed) cfg.train.seed = *a.seed;
  const auto days = io::read_frames_file(a.input, cfg.geometry);
  if (days.empty()) throw Error(ErrorKind::empty_input, "no frames in " + a.input.string());

  auto mcfg = cfg.model;
  if (mcfg.input_mode == InputMode::features) {
    const auto& f = days.front().frames.front();
    if (!f.scene_feat) throw Error(ErrorKind::invalid_argument, "feature mode needs scene_feat on every frame");
    mcfg.scene_dim = static_cast<int>(f.scene_feat->size());
    mcfg.object_dim = f.object_feats && !f.object_feats->empty() ? static_cast<int>(f.object_feats->front().size()) : 1;
  }
  auto model = BilstmCrfModel::create(mcfg, cfg.train.seed);
  cfg.apply_priors(model.transitions);
  const auto windows = make_windows(days, mcfg.input_mode, cfg.window);
  log << "training on " << windows.size() << " windows of up to " << cfg.window << " frames, "
      << model.parameter_count() << " parameters\n";
  const auto trace = fit(model, windows, cfg.train, [&](int epoch, double loss) {
    log << "epoch " << epoch + 1 << " loss " << io::format_double(loss) << '\n';
  });
  auto out = open_output(a.model_out);
  io::write_model(out, model);
  return trace;
}

struct DecodeArgs {
  fs::path input;
  fs::path model;
  std::optional<fs::path> config;
  std::optional<DecodeMode> mode;
  std::optional<int> window;
  fs::path output = "decoded.jsonl";
};

inline std::vector<DayLog> decode(const DecodeArgs& a, std::ostream& log) {
  auto cfg = load_config(a.config);
  const auto mode = a.mode.value_or(cfg.decode_mode);
  const int window = a.window.value_or(cfg.window);
  const auto model = io::read_model_file(a.model);
  const auto days = io::read_frames_file(a.input, cfg.geometry);
  auto decoded = map_days<DayLog>(days, [&](const DayLog& d) {
    const auto labels = decode_day(model, d, mode, window);
    DayLog out{d.day_id, d.frame_interval_s, d.day_start_s, {}};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      FrameRecord f;
      f.day_id = d.day_id;
      f.idx = static_cast<int>(i);
      f.activity = activity_from_code(labels[i]);
      out.frames.push_back(std::move(f));
    }
    return out;
  });
  auto out = open_output(a.output);
  for (const auto& d : decoded) {
    for (const auto& f : d.frames) {
      io::ordered_json j;
      j["day"] = f.day_id;
      j["idx"] = f.idx;
      j["activity"] = std::string(name_of(*f.activity));
      out << j.dump() << '\n';
    }
  }
  log << "decoded " << decoded.size() << " day(s) in " << io::decode_mode_name(mode) << " mode\n";
  return decoded;
}

struct ScoreArgs {
  fs::path input;
  std::optional<fs::path> config;
  fs::path out_dir = "report";
};

inline std::vector<LifestyleReport> score(const ScoreArgs& a, std::ostream& log) {
  const auto cfg = load_config(a.config);
  const auto params = cfg.fluent_params();
  const auto days = io::read_frames_file(a.input, cfg.geometry);
  const auto reports = map_days<LifestyleReport>(
      days, [&](const DayLog& d) { return analyze_day(d, params, cfg.group_map, cfg.script_min_duration_s); });

  fs::create_directories(a.out_dir);
  {
    auto out = open_output(a.out_dir / "fluents.csv");
    io::write_fluents_csv(out, reports);
  }
  io::ordered_json rj;
  rj["days"] = io::ordered_json::array();
  for (const auto& r : reports) rj["days"].push_back(io::report_to_json(r));
  {
    auto out = open_output(a.out_dir / "report.json");
    out << rj.dump(2) << '\n';
  }
  auto out = open_output(a.out_dir / "script.txt");
  for (const auto& r : reports) {
    out << "# day " << r.day_id << '\n' << r.script;
    log << "day " << r.day_id << " lifestyle " << io::format_double(r.lifestyle_score, 4) << '\n';
  }
  return reports;
}

struct EvaluateArgs {
  fs::path preds;
  fs::path truth;
  std::optional<fs::path> config;
  fs::path out_dir = "evaluation";
};

struct Evaluation {
  ConfusionMatrix activities{kNumActivities};
  ConfusionMatrix groups{kNumGroups};
  MacroMetrics activity_metrics;
  MacroMetrics group_metrics;
};

inline Evaluation evaluate(const EvaluateArgs& a, std::ostream& log) {
  const auto cfg = load_config(a.config);
  const auto pred_days = io::read_frames_file(a.preds, cfg.geometry);
  const auto truth_days = io::read_frames_file(a.truth, cfg.geometry);
  if (pred_days.size() != truth_days.size()) {
    throw Error(ErrorKind::length_mismatch, "prediction and truth files cover different numbers of days");
  }
  std::vector<int> preds, truth;
  for (std::size_t d = 0; d < pred_days.size(); ++d) {
    if (pred_days[d].day_id != truth_days[d].day_id || pred_days[d].size() != truth_days[d].size()) {
      throw Error(ErrorKind::length_mismatch, "day " + std::to_string(truth_days[d].day_id) +
                                                  " differs between predictions and truth");
    }
    for (auto l : pred_days[d].labels()) preds.push_back(code_of(l));
    for (auto l : truth_days[d].labels()) truth.push_back(code_of(l));
  }
  Evaluation ev;
  ev.activities = confusion(preds, truth, kNumActivities);
  ev.groups = collapse_to_groups(ev.activities, cfg.group_map);
  ev.activity_metrics = macro_metrics(ev.activities);
  ev.group_metrics = macro_metrics(ev.groups);

  fs::create_directories(a.out_dir);
  const std::vector<std::string_view> anames(kActivityNames.begin(), kActivityNames.end());
  const std::vector<std::string_view> gnames(kGroupNames.begin(), kGroupNames.end());
  {
    auto out = open_output(a.out_dir / "confusion_12.csv");
    io::write_confusion_csv(out, ev.activities, anames);
  }
  {
    auto out = open_output(a.out_dir / "confusion_5.csv");
    io::write_confusion_csv(out, ev.groups, gnames);
  }
  {
    io::ordered_json j;
    j["activities"] = io::metrics_to_json(ev.activity_metrics, anames);
    j["groups"] = io::metrics_to_json(ev.group_metrics, gnames);
    auto out = open_output(a.out_dir / "metrics.json");
    out << j.dump(2) << '\n';
  }
  {
    auto out = open_output(a.out_dir / "table1.csv");
    out << "level,accuracy,macro_precision,macro_recall,macro_f1\n";
    for (const auto& [name, m] : {std::pair{"activities", &ev.activity_metrics}, std::pair{"groups", &ev.group_metrics}}) {
      out << name << ',' << io::format_double(m->accuracy, 4) << ',' << io::format_double(m->macro_precision, 4) << ','
          << io::format_double(m->macro_recall, 4) << ',' << io::format_double(m->macro_f1, 4) << '\n';
    }
  }
  {
    auto out = open_output(a.out_dir / "table2.csv");
    out << "method";
    for (auto n : anames) out << ',' << n;
    out << "\nbilstm_crf";
    for (double f : ev.activity_metrics.f1) out << ',' << io::format_double(f, 4);
    out << '\n';
  }
  log << "accuracy " << io::format_double(ev.activity_metrics.accuracy, 4) << ", macro F1 "
      << io::format_double(ev.activity_metrics.macro_f1, 4) << ", group accuracy "
      << io::format_double(ev.group_metrics.accuracy, 4) << '\n';
  return ev;
}

}  // namespace lifelog::commands
