#include <gtest/gtest.h>

#include <cmath>

#include "lifelog/grad_check.hpp"
#include "lifelog/model.hpp"
#include "lifelog/neural_head.hpp"
#include "test_helpers.hpp"

using namespace lifelog;
using testing_helpers::random_vec;

namespace {

LstmCellParams random_cell(int dx, int dh, Rng& rng, double scale = 1.0) {
  auto p = LstmCellParams::zeros(dx, dh);
  LstmCellParams::visit("", [&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-scale, scale);
  }, p);
  return p;
}

// Exposes one LSTM cell (plus a fixed readout) to grad_check.
struct CellHarness {
  LstmCellParams cell;
  template <class F, class... Hs>
  static void visit(F&& f, Hs&... hs) {
    LstmCellParams::visit("cell", f, hs.cell...);
  }
};

struct LinearHarness {
  DenseLayer layer;
  template <class F, class... Hs>
  static void visit(F&& f, Hs&... hs) {
    DenseLayer::visit("linear", f, hs.layer...);
  }
};

}  // namespace

TEST(LstmStep, ZeroEverythingStaysZero) {
  const auto p = LstmCellParams::zeros(3, 4);
  const auto s = lstm_step(p, Vec::Zero(3), LstmState::zeros(4));
  EXPECT_TRUE(s.h.isZero(0.0));
  EXPECT_TRUE(s.c.isZero(0.0));
}

TEST(LstmStep, ScalarCellWithUnitParameters) {
  auto p = LstmCellParams::zeros(1, 1);
  LstmCellParams::visit("", [](const std::string&, auto& t) { t.setOnes(); }, p);
  LstmStepCache cache;
  const auto s = lstm_step(p, Vec::Zero(1), LstmState::zeros(1), &cache);
  // 30-digit evaluation of the four cell equations.
  EXPECT_NEAR(cache.input_gate(0), 0.731058578630004879, 1e-12);
  EXPECT_NEAR(s.c(0), 0.556769941145939744, 1e-12);
  EXPECT_NEAR(cache.output_gate(0), 0.825889371868461168, 1e-12);
  EXPECT_NEAR(s.h(0), 0.417550614393589518, 1e-12);
}

TEST(LstmStep, ShapeMismatchThrows) {
  const auto p = LstmCellParams::zeros(3, 4);
  EXPECT_THROW(lstm_step(p, Vec::Zero(2), LstmState::zeros(4)), Error);
  EXPECT_THROW(lstm_step(p, Vec::Zero(3), LstmState::zeros(5)), Error);
}

TEST(LstmStep, CoupledGateBoundsFromZeroState) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int dx = 1 + static_cast<int>(rng.below(6)), dh = 1 + static_cast<int>(rng.below(6));
    const auto p = random_cell(dx, dh, rng, 3.0);
    auto s = LstmState::zeros(dh);
    for (int t = 0; t < 30; ++t) {
      s = lstm_step(p, random_vec(dx, rng, 10.0), s);
      EXPECT_LE(s.c.cwiseAbs().maxCoeff(), 1.0);
      EXPECT_LT(s.h.cwiseAbs().maxCoeff(), 1.0);
    }
  }
}

TEST(LstmStep, Deterministic) {
  Rng rng(9);
  const auto p = random_cell(3, 4, rng);
  const Vec x = random_vec(3, rng);
  const auto a = lstm_step(p, x, LstmState::zeros(4));
  const auto b = lstm_step(p, x, LstmState::zeros(4));
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.c, b.c);
}

TEST(Bilstm, LengthOneIsConcatOfSingleSteps) {
  Rng rng(1);
  const auto f = random_cell(3, 2, rng), b = random_cell(3, 4, rng);
  const std::vector<Vec> xs = {random_vec(3, rng)};
  const auto out = bilstm_forward(f, b, xs);
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(out[0].size(), 6);
  EXPECT_EQ(out[0].head(2), lstm_step(f, xs[0], LstmState::zeros(2)).h);
  EXPECT_EQ(out[0].tail(4), lstm_step(b, xs[0], LstmState::zeros(4)).h);
}

TEST(Bilstm, PalindromeWithSharedParamsIsHalfSwapSymmetric) {
  Rng rng(2);
  const auto p = random_cell(3, 4, rng);
  std::vector<Vec> xs;
  for (int i = 0; i < 4; ++i) xs.push_back(random_vec(3, rng));
  for (int i = 2; i >= 0; --i) xs.push_back(xs[i]);  // length 7 palindrome
  const auto out = bilstm_forward(p, p, xs);
  const std::size_t n = xs.size();
  for (std::size_t t = 0; t < n; ++t) {
    EXPECT_LT((out[t].head(4) - out[n - 1 - t].tail(4)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((out[t].tail(4) - out[n - 1 - t].head(4)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Bilstm, ZeroParamsGiveZeroOutputs) {
  Rng rng(3);
  const auto p = LstmCellParams::zeros(3, 2);
  std::vector<Vec> xs = {random_vec(3, rng), random_vec(3, rng)};
  for (const auto& h : bilstm_forward(p, p, xs)) EXPECT_TRUE(h.isZero(0.0));
}

TEST(Bilstm, EmptySequenceThrows) {
  const auto p = LstmCellParams::zeros(3, 2);
  EXPECT_THROW(bilstm_forward(p, p, std::vector<Vec>{}), Error);
}

TEST(Fusion, ZeroWeightsGiveZeroVector) {
  const auto head = FusionHeadParams::zeros(8, 6);
  Rng rng(4);
  const std::vector<Vec> objs = {random_vec(6, rng)};
  const Vec out = fusion_forward(head, random_vec(8, rng), objs);
  EXPECT_EQ(out.size(), 500);
  EXPECT_TRUE(out.isZero(0.0));
}

TEST(Fusion, PaperDimensions) {
  Rng rng(5);
  const auto head = FusionHeadParams::random(2048, 1024, rng);
  EXPECT_EQ(head.fc1.out_dim(), 500);
  EXPECT_EQ(head.fc2.out_dim(), 400);
  EXPECT_EQ(head.fc3.in_dim(), 900);
  const std::vector<Vec> objs = {random_vec(1024, rng), random_vec(1024, rng)};
  EXPECT_EQ(fusion_forward(head, random_vec(2048, rng), objs).size(), 500);
}

TEST(Fusion, DuplicateProposalMatchesSingle) {
  Rng rng(6);
  const auto head = FusionHeadParams::random(5, 4, rng, 3, 2, 6);
  const Vec scene = random_vec(5, rng), obj = random_vec(4, rng);
  const std::vector<Vec> one = {obj}, two = {obj, obj};
  EXPECT_LT((fusion_forward(head, scene, one) - fusion_forward(head, scene, two)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Fusion, PermutationInvariant) {
  Rng rng(7);
  for (auto pool : {PoolMode::mean, PoolMode::max}) {
    auto head = FusionHeadParams::random(5, 4, rng, 3, 2, 6);
    head.pool = pool;
    const Vec scene = random_vec(5, rng);
    std::vector<Vec> objs = {random_vec(4, rng), random_vec(4, rng), random_vec(4, rng)};
    const Vec a = fusion_forward(head, scene, objs);
    std::swap(objs[0], objs[2]);
    EXPECT_LT((a - fusion_forward(head, scene, objs)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Fusion, EmptyProposalListContributesZero) {
  Rng rng(8);
  auto head = FusionHeadParams::random(5, 4, rng, 3, 2, 6);
  const Vec scene = random_vec(5, rng);
  Vec concat(5);
  concat << head.fc1.forward(scene), Vec::Zero(2);
  EXPECT_EQ(fusion_forward(head, scene, std::vector<Vec>{}), head.fc3.forward(concat));
}

TEST(Fusion, DimensionMismatchThrows) {
  const auto head = FusionHeadParams::zeros(8, 6);
  const std::vector<Vec> objs = {Vec::Zero(5)};
  EXPECT_THROW(fusion_forward(head, Vec::Zero(8), objs), Error);
  EXPECT_THROW(fusion_forward(head, Vec::Zero(7), std::vector<Vec>{}), Error);
}

TEST(Emission, ZeroProjection) {
  EmissionProjection proj{DenseLayer::zeros(8, 12)};
  Rng rng(1);
  std::vector<Vec> hs(15, random_vec(8, rng));
  const Mat P = emission_forward(proj, hs);
  EXPECT_EQ(P.rows(), 15);
  EXPECT_EQ(P.cols(), 12);
  EXPECT_TRUE(P.isZero(0.0));
}

TEST(Emission, IdentityProjectionSelectsComponents) {
  // 2*d_h = 24 inputs, k = 12 outputs reading the forward half.
  EmissionProjection proj{DenseLayer::zeros(24, 12)};
  proj.layer.weight.leftCols(12).setIdentity();
  Rng rng(2);
  std::vector<Vec> hs = {random_vec(24, rng), random_vec(24, rng)};
  const Mat P = emission_forward(proj, hs);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(P.row(i).transpose(), hs[i].head(12));
}

TEST(Emission, ShapeMismatchThrows) {
  EmissionProjection proj{DenseLayer::zeros(8, 12)};
  EXPECT_THROW(emission_forward(proj, std::vector<Vec>{Vec::Zero(7)}), Error);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  Rng rng(10);
  auto model = BilstmCrfModel::create(testing_helpers::toy_feature_config(), 1);
  const auto ex = testing_helpers::random_feature_example(model.config, 5, rng);
  ForwardTape tape;
  const Mat P = model_forward(model, ex.frames, &tape);
  auto grad = model.zeros_like();
  model_backward(model, tape, Mat::Zero(P.rows(), P.cols()), grad);
  BilstmCrfModel::visit([](const std::string& name, const auto& g) { EXPECT_TRUE(g.isZero(0.0)) << name; }, grad);
}

TEST(Backward, WithoutForwardStateThrows) {
  const auto model = BilstmCrfModel::create(testing_helpers::toy_feature_config(), 1);
  auto grad = model.zeros_like();
  ForwardTape empty;
  try {
    model_backward(model, empty, Mat::Zero(3, 12), grad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_forward_state);
  }
  LstmSequenceCache none;
  LstmCellParams g = LstmCellParams::zeros(2, 2);
  EXPECT_THROW(lstm_backward(g, none, std::vector<Vec>{}, g), Error);
}

TEST(Backward, LstmMatchesFiniteDifferences) {
  Rng rng(12);
  const int dx = 3, dh = 4, n = 5;
  CellHarness h{random_cell(dx, dh, rng)};
  std::vector<Vec> xs, us;
  for (int t = 0; t < n; ++t) {
    xs.push_back(random_vec(dx, rng));
    us.push_back(random_vec(dh, rng));
  }
  const Vec uc = random_vec(dh, rng);
  // L = sum_t <u_t, h_t> + <u_c, c_n>
  auto loss = [&](const CellHarness& p) {
    auto s = LstmState::zeros(dh);
    double l = 0.0;
    for (int t = 0; t < n; ++t) {
      s = lstm_step(p.cell, xs[t], s);
      l += us[t].dot(s.h);
    }
    return l + uc.dot(s.c);
  };
  LstmSequenceCache cache;
  lstm_forward(h.cell, xs, &cache);
  CellHarness g{LstmCellParams::zeros(dx, dh)};
  lstm_backward(h.cell, cache, us, g.cell, &uc);
  const auto report = grad_check(h, g, loss);
  EXPECT_LT(report.max_rel_error, 1e-4) << report.worst_tensor;
}

TEST(Backward, OutputGateUnusedWhenOnlyCellIsObserved) {
  Rng rng(13);
  const auto p = random_cell(3, 4, rng);
  const std::vector<Vec> xs = {random_vec(3, rng)};
  LstmSequenceCache cache;
  lstm_forward(p, xs, &cache);
  auto g = LstmCellParams::zeros(3, 4);
  const Vec uc = random_vec(4, rng);
  lstm_backward(p, cache, std::vector<Vec>{Vec::Zero(4)}, g, &uc);
  EXPECT_TRUE(g.w_c_output.isZero(0.0));
  EXPECT_TRUE(g.w_x_output.isZero(0.0));
  EXPECT_TRUE(g.b_output.isZero(0.0));
  EXPECT_FALSE(g.w_x_input.isZero(0.0));
}

TEST(GradCheck, LinearModelIsExact) {
  Rng rng(14);
  LinearHarness h{DenseLayer::random(4, 3, rng)};
  h.layer.bias = random_vec(3, rng);
  const Vec x = random_vec(4, rng), u = random_vec(3, rng);
  auto loss = [&](const LinearHarness& p) { return u.dot(p.layer.forward(x)); };
  LinearHarness g{DenseLayer::zeros(4, 3)};
  h.layer.backward(x, u, g.layer);
  const auto report = grad_check(h, g, loss);
  EXPECT_LT(report.max_rel_error, 1e-9);
  EXPECT_TRUE(report.passed());
}

TEST(GradCheck, SignFlipIsCaught) {
  Rng rng(15);
  LinearHarness h{DenseLayer::random(4, 3, rng)};
  const Vec x = random_vec(4, rng), u = random_vec(3, rng);
  auto loss = [&](const LinearHarness& p) { return u.dot(p.layer.forward(x)); };
  LinearHarness g{DenseLayer::zeros(4, 3)};
  h.layer.backward(x, u, g.layer);
  g.layer.weight = -g.layer.weight;
  const auto report = grad_check(h, g, loss);
  EXPECT_GT(report.max_rel_error, 0.5);
  EXPECT_FALSE(report.passed());
  EXPECT_EQ(report.worst_tensor, "linear.weight");
}

TEST(GradCheck, FullToyModel) {
  Rng rng(16);
  for (auto pool : {PoolMode::mean, PoolMode::max}) {
    auto cfg = testing_helpers::toy_feature_config();
    cfg.pool = pool;
    auto model = BilstmCrfModel::create(cfg, 3);
    testing_helpers::randomize(model, rng);
    const auto ex = testing_helpers::random_feature_example(cfg, 6, rng);
    auto grad = model.zeros_like();
    joint_nll(model, ex, &grad);
    const auto report = grad_check(model, grad, [&](const BilstmCrfModel& m) { return joint_nll(m, ex); });
    EXPECT_LT(report.max_rel_error, 1e-4) << report.worst_tensor;
  }
}
