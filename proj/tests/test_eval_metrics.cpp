#include <gtest/gtest.h>

#include "lifelog/eval_metrics.hpp"
#include "lifelog/random.hpp"

using namespace lifelog;

TEST(Confusion, PerfectPredictionsAreDiagonal) {
  const std::vector<int> y = {0, 1, 2, 2, 1};
  const auto cm = confusion(y, y, 3);
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p)
      if (t != p) EXPECT_EQ(cm.at(t, p), 0u);
  EXPECT_EQ(cm.trace(), 5u);
}

TEST(Confusion, ThreeFrameExample) {
  const std::vector<int> truth = {0, 0, 1}, preds = {0, 1, 1};
  const auto cm = confusion(preds, truth, 2);
  EXPECT_EQ(cm.at(0, 0), 1u);
  EXPECT_EQ(cm.at(0, 1), 1u);
  EXPECT_EQ(cm.at(1, 0), 0u);
  EXPECT_EQ(cm.at(1, 1), 1u);
}

TEST(Confusion, EmptyInputGivesZeroMatrix) { EXPECT_EQ(confusion({}, {}, 4).total(), 0u); }

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<int>{0}, std::vector<int>{0, 1}, 2), Error);
  EXPECT_THROW(confusion(std::vector<int>{2}, std::vector<int>{0}, 2), Error);
}

TEST(MacroMetrics, DiagonalIsPerfect) {
  const std::vector<int> y = {0, 1, 2};
  const auto m = macro_metrics(confusion(y, y, 3));
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_precision, 1.0);
  EXPECT_EQ(m.macro_recall, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
}

TEST(MacroMetrics, ThreeFrameExample) {
  const std::vector<int> truth = {0, 0, 1}, preds = {0, 1, 1};
  const auto m = macro_metrics(confusion(preds, truth, 2));
  // class 0: TP 1, FP 0, FN 1 -> P 1, R 1/2, F1 2/3; class 1: TP 1, FP 1, FN 0 -> P 1/2, R 1, F1 2/3.
  EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.macro_precision, 0.75);
  EXPECT_DOUBLE_EQ(m.macro_recall, 0.75);
  EXPECT_DOUBLE_EQ(m.macro_f1_of_means, 0.75);
}

TEST(MacroMetrics, AbsentClassScoresZeroAndCounts) {
  const std::vector<int> y = {0, 1, 0};
  const auto m = macro_metrics(confusion(y, y, 3));
  EXPECT_EQ(m.precision[2], 0.0);
  EXPECT_EQ(m.recall[2], 0.0);
  EXPECT_EQ(m.f1[2], 0.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 2.0 / 3.0);
}

TEST(MacroMetrics, EmptyMatrixThrows) { EXPECT_THROW(macro_metrics(ConfusionMatrix(3)), Error); }

TEST(CollapseToGroups, DiagonalStaysDiagonal) {
  ConfusionMatrix cm(kNumActivities);
  for (int c = 0; c < kNumActivities; ++c) cm.at(c, c) = 10;
  const auto g = collapse_to_groups(cm, GroupMap::defaults());
  EXPECT_EQ(g.at(code_of(ActivityGroup::sedentary), code_of(ActivityGroup::sedentary)), 40u);
  EXPECT_EQ(g.at(code_of(ActivityGroup::food), code_of(ActivityGroup::food)), 20u);
  EXPECT_EQ(g.at(code_of(ActivityGroup::motion), code_of(ActivityGroup::motion)), 30u);
  EXPECT_EQ(g.at(code_of(ActivityGroup::rest), code_of(ActivityGroup::rest)), 10u);
  EXPECT_EQ(g.at(code_of(ActivityGroup::social_errands), code_of(ActivityGroup::social_errands)), 20u);
  EXPECT_EQ(g.trace(), g.total());
}

TEST(CollapseToGroups, WithinGroupConfusionBecomesCorrect) {
  ConfusionMatrix cm(kNumActivities);
  cm.at(code_of(Activity::eating), code_of(Activity::drinking)) = 7;
  const auto g = collapse_to_groups(cm, GroupMap::defaults());
  EXPECT_EQ(g.at(code_of(ActivityGroup::food), code_of(ActivityGroup::food)), 7u);
  EXPECT_EQ(g.total(), 7u);
}

TEST(CollapseToGroups, ConservesTotalsAndNeverLowersAccuracy) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    ConfusionMatrix cm(kNumActivities);
    for (int t = 0; t < kNumActivities; ++t)
      for (int p = 0; p < kNumActivities; ++p) cm.at(t, p) = rng.below(50);
    if (cm.total() == 0) continue;
    const auto g = collapse_to_groups(cm, GroupMap::defaults());
    EXPECT_EQ(g.total(), cm.total());
    EXPECT_LE(macro_metrics(cm).accuracy, macro_metrics(g).accuracy);
  }
}

TEST(CollapseToGroups, RejectsWrongSize) { EXPECT_THROW(collapse_to_groups(ConfusionMatrix(5), GroupMap::defaults()), Error); }
