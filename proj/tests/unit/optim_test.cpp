// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "atn/optim/optimizer.hpp"
#include "finite_diff.hpp"

namespace atn {
namespace {

using testing::random_matrix;

struct Problem {
  std::vector<Matrix> params;
  std::vector<Matrix> grads;

  std::vector<Matrix*> p() {
    std::vector<Matrix*> out;
    for (auto& m : params) out.push_back(&m);
    return out;
  }
  std::vector<const Matrix*> g() const {
    std::vector<const Matrix*> out;
    for (const auto& m : grads) out.push_back(&m);
    return out;
  }
  std::vector<Matrix*> g_mut() {
    std::vector<Matrix*> out;
    for (auto& m : grads) out.push_back(&m);
    return out;
  }
};

Problem scalar(double p, double g) {
  return {{Matrix(1, 1, p)}, {Matrix(1, 1, g)}};
}

double norm_sq(const std::vector<Matrix>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s += sum_squares(m);
  return s;
}

// ------------------------------------------------------------------ clipping

TEST(Clip, BelowThresholdIsIdentity) {
  Problem pr{{}, {Matrix::from_rows({{0.3, -0.4}})}};
  EXPECT_DOUBLE_EQ(clip_global_norm(pr.g_mut(), 1.0), 0.5);
  EXPECT_EQ(pr.grads[0], Matrix::from_rows({{0.3, -0.4}}));
}

TEST(Clip, ThreeFourFive) {
  Problem pr{{}, {Matrix::from_rows({{3, 4}})}};
  EXPECT_DOUBLE_EQ(clip_global_norm(pr.g_mut(), 1.0), 5.0);
  EXPECT_NEAR(pr.grads[0][0], 0.6, 1e-15);
  EXPECT_NEAR(pr.grads[0][1], 0.8, 1e-15);
}

TEST(Clip, JointNormNeverExceedsLimit) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    Problem pr;
    const int tensors = 1 + trial % 4;
    for (int i = 0; i < tensors; ++i)
      pr.grads.push_back(random_matrix(rng, 1 + rng.below(4), 1 + rng.below(4), 10.0));
    const std::vector<Matrix> before = pr.grads;
    const double max_norm = rng.uniform(0.1, 20.0);
    const double norm = clip_global_norm(pr.g_mut(), max_norm);
    EXPECT_LE(global_norm(pr.g()), max_norm + 1e-12);
    if (norm <= max_norm) {
      EXPECT_EQ(pr.grads, before);
    }
  }
}

TEST(Clip, RejectsNonPositiveLimit) {
  Problem pr = scalar(0, 1);
  EXPECT_THROW(clip_global_norm(pr.g_mut(), 0.0), std::invalid_argument);
}

// ------------------------------------------------------------------ rmsprop

TEST(RmsProp, ZeroGradientLeavesParams) {
  OptState s({OptimizerKind::rmsprop, 1e-3});
  Problem pr = scalar(1.5, 0.0);
  rmsprop_step(s, pr.p(), pr.g());
  EXPECT_EQ(pr.params[0][0], 1.5);
}

TEST(RmsProp, FirstStepFromZeroState) {
  OptState s({OptimizerKind::rmsprop, 1e-3});
  Problem pr = scalar(0.0, 1.0);
  rmsprop_step(s, pr.p(), pr.g());
  EXPECT_NEAR(pr.params[0][0], -1e-3 / (std::sqrt(0.01) + 1e-8), 1e-15);
  EXPECT_NEAR(pr.params[0][0], -1e-2, 1e-8);
}

TEST(RmsProp, ConstantGradientApproachesSignStep) {
  // v converges to g^2, so each update tends to lr g / (|g| + eps).
  OptState s({OptimizerKind::rmsprop, 1e-3});
  Problem pr = scalar(0.0, -0.37);
  double last = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const double before = pr.params[0][0];
    rmsprop_step(s, pr.p(), pr.g());
    last = pr.params[0][0] - before;
  }
  EXPECT_NEAR(last, 1e-3 * 0.37 / (0.37 + 1e-8), 1e-9);
  EXPECT_EQ(s.steps, 3000u);
}

TEST(RmsProp, ShapeMismatch) {
  OptState s({OptimizerKind::rmsprop, 1e-3});
  Problem pr{{Matrix(1, 2)}, {Matrix(2, 1)}};
  EXPECT_THROW(rmsprop_step(s, pr.p(), pr.g()), ShapeError);
  Problem ok = scalar(0, 1);
  rmsprop_step(s, ok.p(), ok.g());
  Problem other{{Matrix(1, 2)}, {Matrix(1, 2)}};
  EXPECT_THROW(rmsprop_step(s, other.p(), other.g()), ShapeError);
}

// ------------------------------------------------------------------ adam

TEST(Adam, ZeroGradientFromZeroState) {
  OptState s({OptimizerKind::adam, 1e-2});
  Problem pr = scalar(0.25, 0.0);
  adam_step(s, pr.p(), pr.g());
  EXPECT_EQ(pr.params[0][0], 0.25);
}

TEST(Adam, FirstStepIsSignTimesRate) {
  for (double g : {3.0, -0.02, 1e-3}) {
    OptState s({OptimizerKind::adam, 1e-2});
    Problem pr = scalar(0.0, g);
    adam_step(s, pr.p(), pr.g());
    EXPECT_NEAR(pr.params[0][0], -1e-2 * std::copysign(1.0, g), 1e-7) << g;
  }
}

TEST(Adam, TwoStepsDecreaseQuadratic) {
  Rng rng(2);
  OptState s({OptimizerKind::adam, 1e-2});
  Problem pr{{random_matrix(rng, 3, 3)}, {Matrix(3, 3)}};
  const double start = norm_sq(pr.params);
  for (int i = 0; i < 2; ++i) {
    pr.grads[0] = scale(pr.params[0], 2.0);
    adam_step(s, pr.p(), pr.g());
  }
  EXPECT_LT(norm_sq(pr.params), start);
}

TEST(Adam, ShapeMismatch) {
  OptState s({OptimizerKind::adam, 1e-2});
  Problem pr{{Matrix(1, 2), Matrix(1, 1)}, {Matrix(1, 2)}};
  EXPECT_THROW(adam_step(s, pr.p(), pr.g()), ShapeError);
}

// ------------------------------------------------------------------ sgd

TEST(Sgd, Examples) {
  OptState zero({OptimizerKind::sgd, 0.0});
  Problem a = scalar(1.0, 0.5);
  sgd_step(zero, a.p(), a.g());
  EXPECT_EQ(a.params[0][0], 1.0);
  OptState one({OptimizerKind::sgd, 1.0});
  sgd_step(one, a.p(), a.g());
  EXPECT_EQ(a.params[0][0], 0.5);
  Problem bad{{Matrix(1, 2)}, {Matrix(1, 3)}};
  EXPECT_THROW(sgd_step(one, bad.p(), bad.g()), ShapeError);
}

TEST(Sgd, AgreesWithFrozenRmsPropOnlyAtZeroGradient) {
  OptimizerConfig rms{OptimizerKind::rmsprop, 0.1};
  rms.rho = 1.0;
  OptState r(rms), s({OptimizerKind::sgd, 0.1});
  Problem x = scalar(2.0, 0.0), y = scalar(2.0, 0.0);
  rmsprop_step(r, x.p(), x.g());
  sgd_step(s, y.p(), y.g());
  EXPECT_EQ(x.params[0][0], y.params[0][0]);
  x.grads[0][0] = y.grads[0][0] = 0.5;
  rmsprop_step(r, x.p(), x.g());
  sgd_step(s, y.p(), y.g());
  EXPECT_NE(x.params[0][0], y.params[0][0]);
}

// ------------------------------------------------------------------ shared

TEST(Optimizers, DescendOnSquaredNorm) {
  Rng rng(3);
  for (OptimizerKind kind : {OptimizerKind::sgd, OptimizerKind::rmsprop, OptimizerKind::adam}) {
    OptState s({kind, 1e-3});
    Problem pr{{random_matrix(rng, 2, 3), random_matrix(rng, 1, 4)}, {Matrix(2, 3), Matrix(1, 4)}};
    double prev = norm_sq(pr.params);
    for (int i = 0; i < 100; ++i) {
      for (std::size_t j = 0; j < pr.params.size(); ++j) pr.grads[j] = scale(pr.params[j], 2.0);
      optimizer_step(s, pr.p(), pr.g());
      const double now = norm_sq(pr.params);
      ASSERT_LT(now, prev) << to_string(kind) << " step " << i;
      prev = now;
    }
  }
}

TEST(Optimizers, Deterministic) {
  Rng rng(4);
  const Matrix p0 = random_matrix(rng, 3, 2), g0 = random_matrix(rng, 3, 2);
  for (OptimizerKind kind : {OptimizerKind::sgd, OptimizerKind::rmsprop, OptimizerKind::adam}) {
    Problem a{{p0}, {g0}}, b{{p0}, {g0}};
    OptState sa({kind, 1e-2}), sb({kind, 1e-2});
    for (int i = 0; i < 5; ++i) {
      optimizer_step(sa, a.p(), a.g());
      optimizer_step(sb, b.p(), b.g());
    }
    EXPECT_EQ(a.params, b.params);
  }
}

TEST(Optimizers, ParseNames) {
  EXPECT_EQ(parse_optimizer_kind("adam"), OptimizerKind::adam);
  EXPECT_EQ(to_string(parse_optimizer_kind("rmsprop")), "rmsprop");
  EXPECT_THROW(parse_optimizer_kind("asgd"), std::invalid_argument);
}

}  // namespace
}  // namespace atn
