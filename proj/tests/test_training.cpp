#include <gtest/gtest.h>

#include "lifelog/eval_metrics.hpp"
#include "lifelog/simulator.hpp"
#include "lifelog/training.hpp"
#include "test_helpers.hpp"

using namespace lifelog;

namespace {

DayLog short_day(int day_id, std::uint64_t seed, double margin, double sigma, int minutes = 60) {
  ScheduleSpec s;
  s.day_id = day_id;
  s.seed = seed;
  s.margin = margin;
  s.sigma = sigma;
  s.geometry.day_end_s = s.geometry.day_start_s + minutes * 60;
  const Activity cycle[] = {Activity::using_computer, Activity::drinking, Activity::resting, Activity::eating,
                            Activity::walking, Activity::reading, Activity::social, Activity::shopping,
                            Activity::using_phone, Activity::attending_class, Activity::exercising_indoor,
                            Activity::exercising_outdoor};
  for (int b = 0; b < minutes / 5; ++b) s.blocks.push_back({cycle[(b + day_id) % 12], 5});
  return generate_day(s);
}

}  // namespace

TEST(Windows, ConsecutiveNonOverlappingWithPartialTail) {
  const auto day = short_day(0, 1, 4, 1, 5);  // 100 frames
  const auto ws = make_windows(std::span(&day, 1), InputMode::emissions, 15);
  ASSERT_EQ(ws.size(), 7u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(ws[i].frames.size(), 15u);
  EXPECT_EQ(ws[6].frames.size(), 10u);
  EXPECT_EQ(ws[6].labels.size(), 10u);
  EXPECT_EQ(ws[1].frames[0].emissions(0), (*day.frames[15].emissions)[0]);
}

TEST(Windows, MissingInputsOrLabelsAreErrors) {
  auto day = short_day(0, 1, 4, 1, 5);
  EXPECT_THROW(make_windows(std::span(&day, 1), InputMode::features, 15), Error);
  day.frames[3].activity.reset();
  EXPECT_THROW(make_windows(std::span(&day, 1), InputMode::emissions, 15), Error);
}

TEST(Fit, EmptyTrainingSetThrows) {
  auto model = BilstmCrfModel::create(ModelConfig{}, 1);
  EXPECT_THROW(fit(model, std::vector<SequenceExample>{}, TrainOptions{}), Error);
}

TEST(Fit, ZeroLearningRateChangesNothing) {
  const auto day = short_day(0, 1, 4, 1, 10);
  const auto ws = make_windows(std::span(&day, 1), InputMode::emissions);
  auto model = BilstmCrfModel::create(ModelConfig{}, 3);
  const auto before = model;
  TrainOptions o;
  o.learning_rate = 0.0;
  o.epochs = 3;
  const auto trace = fit(model, ws, o);
  ASSERT_EQ(trace.epoch_loss.size(), 3u);
  EXPECT_NEAR(trace.epoch_loss[0], trace.epoch_loss[1], 1e-12 * trace.epoch_loss[0]);
  EXPECT_NEAR(trace.epoch_loss[1], trace.epoch_loss[2], 1e-12 * trace.epoch_loss[0]);
  BilstmCrfModel::visit([](const std::string& n, const auto& a, const auto& b) { EXPECT_EQ(a, b) << n; }, model,
                        before);
}

TEST(Fit, SmallStepDescendsOnAFixedBatch) {
  Rng rng(2);
  auto cfg = testing_helpers::toy_feature_config(4);
  auto model = BilstmCrfModel::create(cfg, 5);
  std::vector<SequenceExample> batch = {testing_helpers::random_feature_example(cfg, 8, rng)};
  TrainOptions o;
  o.learning_rate = 1e-3;
  o.epochs = 30;
  o.batch_size = 0;
  o.shuffle = false;
  o.clip_norm = 0.0;
  const auto trace = fit(model, batch, o);
  for (std::size_t e = 1; e < trace.epoch_loss.size(); ++e) EXPECT_LE(trace.epoch_loss[e], trace.epoch_loss[e - 1]);
  EXPECT_LT(trace.epoch_loss.back(), trace.epoch_loss.front());
}

TEST(Fit, SeparableEmissionsReachHighAccuracy) {
  std::vector<DayLog> days = {short_day(0, 1, 4, 0.5), short_day(1, 2, 4, 0.5)};
  const auto ws = make_windows(days, InputMode::emissions);
  ModelConfig cfg;
  cfg.hidden_dim = 12;
  auto model = BilstmCrfModel::create(cfg, 7);
  TrainOptions o;
  o.learning_rate = 0.1;
  o.epochs = 50;
  o.batch_size = 8;
  o.seed = 3;
  fit(model, ws, o);
  std::vector<int> pred, truth;
  for (const auto& d : days) {
    const auto p = decode_day(model, d);
    pred.insert(pred.end(), p.begin(), p.end());
    for (auto a : d.labels()) truth.push_back(code_of(a));
  }
  EXPECT_GE(macro_metrics(confusion(pred, truth, kNumActivities)).accuracy, 0.95);
}

TEST(Fit, DeterministicGivenSeed) {
  const auto day = short_day(0, 1, 2, 1, 10);
  const auto ws = make_windows(std::span(&day, 1), InputMode::emissions);
  TrainOptions o;
  o.epochs = 2;
  o.seed = 11;
  auto a = BilstmCrfModel::create(ModelConfig{}, 1);
  auto b = a;
  EXPECT_EQ(fit(a, ws, o).epoch_loss, fit(b, ws, o).epoch_loss);
  BilstmCrfModel::visit([](const std::string& n, const auto& x, const auto& y) { EXPECT_EQ(x, y) << n; }, a, b);
}

TEST(Fit, NonFiniteLossAborts) {
  const auto day = short_day(0, 1, 4, 1, 5);
  const auto ws = make_windows(std::span(&day, 1), InputMode::emissions);
  auto model = BilstmCrfModel::create(ModelConfig{}, 1);
  // Forbid a transition the gold sequence uses.
  const int a = ws[0].labels[0];
  model.transitions(model.transitions.start(), a) = kNegInf;
  try {
    fit(model, ws, TrainOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_finite);
  }
}

TEST(Decode, WindowAndWholeDayCoverEveryFrame) {
  const auto day = short_day(0, 1, 4, 1, 7);
  const auto model = BilstmCrfModel::create(ModelConfig{}, 1);
  EXPECT_EQ(decode_day(model, day, DecodeMode::window).size(), day.size());
  EXPECT_EQ(decode_day(model, day, DecodeMode::whole_day).size(), day.size());
}

TEST(Decode, FeatureModeEndToEnd) {
  ScheduleSpec s;
  s.features = FeatureMode::synthetic;
  s.scene_dim = 6;
  s.object_dim = 4;
  s.feature_sigma = 0.3;
  s.geometry.day_end_s = s.geometry.day_start_s + 3600;
  const Activity cycle[] = {Activity::using_computer, Activity::eating, Activity::walking, Activity::resting};
  for (int b = 0; b < 12; ++b) s.blocks.push_back({cycle[b % 4], 5});
  const auto day = generate_day(s);
  ModelConfig cfg;
  cfg.input_mode = InputMode::features;
  cfg.scene_dim = 6;
  cfg.object_dim = 4;
  cfg.scene_out = 8;
  cfg.object_out = 6;
  cfg.fused_out = 8;
  cfg.hidden_dim = 8;
  auto model = BilstmCrfModel::create(cfg, 2);
  const auto ws = make_windows(std::span(&day, 1), InputMode::features);
  TrainOptions o;
  o.epochs = 30;
  o.learning_rate = 0.05;
  o.batch_size = 8;
  fit(model, ws, o);
  const auto pred = decode_day(model, day);
  std::vector<int> truth;
  for (auto a : day.labels()) truth.push_back(code_of(a));
  EXPECT_GE(macro_metrics(confusion(pred, truth, kNumActivities)).accuracy, 0.95);
}
