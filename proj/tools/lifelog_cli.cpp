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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lifelog/commands.hpp"

namespace {

int fail(const char* code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lifelog;
  namespace fs = std::filesystem;

  CLI::App app{"Lifelog activity recognition and lifestyle scoring"};
  app.require_subcommand(1);

  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string input, output, model, truth, templ = "healthy", mode;
  std::optional<int> window;

  auto add_config = [&](CLI::App* c) { c->add_option("--config", config, "Run configuration (JSON)"); };

  auto* sim = app.add_subcommand("simulate", "Generate synthetic labeled frames (frames.jsonl)");
  sim->add_option("--input", input, "Simulation spec (JSON); overrides --template");
  sim->add_option("--template", templ, "healthy | unhealthy | week");
  sim->add_option("--seed", seed, "Noise seed");
  sim->add_option("--output", output, "Output frames.jsonl")->required();
  add_config(sim);

  auto* tr = app.add_subcommand("train", "Fit the BiLSTM-CRF on labeled frames");
  tr->add_option("--input", input, "Labeled frames.jsonl")->required();
  tr->add_option("--model", model, "Model file to write")->required();
  tr->add_option("--seed", seed, "Initialization and shuffling seed");
  add_config(tr);

  auto* dec = app.add_subcommand("decode", "Predict per-frame activities with Viterbi");
  dec->add_option("--input", input, "frames.jsonl with emissions or features")->required();
  dec->add_option("--model", model, "Trained model file")->required();
  dec->add_option("--output", output, "Predicted labels (JSONL)")->required();
  dec->add_option("--window", window, "Window length in frames");
  dec->add_option("--mode", mode, "window | whole_day");
  add_config(dec);

  auto* sc = app.add_subcommand("score", "Compute fluents, lifestyle scores and scripts");
  sc->add_option("--input", input, "Labeled frames.jsonl")->required();
  sc->add_option("--output", output, "Output directory")->required();
  add_config(sc);

  auto* ev = app.add_subcommand("evaluate", "Confusion matrices and macro metrics");
  ev->add_option("--input", input, "Predicted labels (JSONL)")->required();
  ev->add_option("--truth", truth, "Ground-truth frames.jsonl")->required();
  ev->add_option("--output", output, "Output directory")->required();
  add_config(ev);

  CLI11_PARSE(app, argc, argv);

  const auto cfg_path = config ? std::optional<fs::path>(*config) : std::nullopt;
  try {
    if (sim->parsed()) {
      commands::SimulateArgs a;
      if (!input.empty()) a.spec_file = input;
      a.template_name = templ;
      a.config = cfg_path;
      a.seed = seed.value_or(0);
      a.output = output;
      commands::simulate(a, std::cout);
    } else if (tr->parsed()) {
      commands::train({input, cfg_path, seed, model}, std::cout);
    } else if (dec->parsed()) {
      commands::DecodeArgs a{input, model, cfg_path, std::nullopt, window, output};
      if (!mode.empty()) a.mode = io::parse_decode_mode(mode);
      commands::decode(a, std::cout);
    } else if (sc->parsed()) {
      commands::score({input, cfg_path, output}, std::cout);
    } else if (ev->parsed()) {
      commands::evaluate({input, truth, cfg_path, output}, std::cout);
    }
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", e.what());
  }
  return 0;
}
