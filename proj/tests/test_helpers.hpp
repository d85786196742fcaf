#pragma once

#include <string>

#include "lifelog/model.hpp"
#include "lifelog/random.hpp"

namespace testing_helpers {

// Overwrites every finite parameter (biases and transitions included) with U(-scale, scale).
inline void randomize(lifelog::BilstmCrfModel& m, lifelog::Rng& rng, double scale = 0.5) {
  lifelog::BilstmCrfModel::visit(
      [&](const std::string&, auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) {
          if (std::isfinite(t.data()[i])) t.data()[i] = rng.uniform(-scale, scale);
        }
      },
      m);
}

inline lifelog::Vec random_vec(Eigen::Index n, lifelog::Rng& rng, double scale = 1.0) {
  lifelog::Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-scale, scale);
  return v;
}

inline lifelog::ModelConfig toy_feature_config(int labels = 12) {
  lifelog::ModelConfig c;
  c.input_mode = lifelog::InputMode::features;
  c.num_labels = labels;
  c.hidden_dim = 4;
  c.scene_dim = 4;
  c.object_dim = 3;
  c.scene_out = 3;
  c.object_out = 2;
  c.fused_out = 5;
  return c;
}

inline lifelog::SequenceExample random_feature_example(const lifelog::ModelConfig& c, int n, lifelog::Rng& rng) {
  lifelog::SequenceExample ex;
  for (int t = 0; t < n; ++t) {
    lifelog::FrameInput in;
    in.scene = random_vec(c.scene_dim, rng);
    const int objects = static_cast<int>(rng.below(3));  // zero to two proposals
    for (int o = 0; o < objects; ++o) in.objects.push_back(random_vec(c.object_dim, rng));
    ex.frames.push_back(std::move(in));
    ex.labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(c.num_labels))));
  }
  return ex;
}

}  // namespace testing_helpers
