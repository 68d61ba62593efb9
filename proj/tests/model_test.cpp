// Copyright 2026 The ECQP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecqp/model.hpp"

#include <random>

#include <gtest/gtest.h>

#include "ecqp/asqp.hpp"

namespace ecqp {
namespace {

EcqpInstance Ball(const Matrix& A, const Vector& b) {
  EcqpInstance inst;
  inst.A = SymMatrix::FromMatrix(A);
  inst.b = b;
  inst.ellipsoids.push_back({Matrix::Identity(A.rows(), A.rows()), Vector::Zero(A.rows())});
  return inst;
}

TEST(ValidateTest, UnitBall) {
  const ValidationReport rep = Validate(Ball(Matrix::Identity(2, 2), Vector::Zero(2)));
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.gamma, 0.0);
}

TEST(ValidateTest, OriginOnBoundary) {
  EcqpInstance inst = Ball(Matrix::Identity(2, 2), Vector::Zero(2));
  inst.ellipsoids.push_back({Matrix::Identity(2, 2), Vector::Unit(2, 0)});
  const ValidationReport rep = Validate(inst);
  EXPECT_FALSE(rep.ok);
  ASSERT_EQ(rep.offending.size(), 1u);
  EXPECT_EQ(rep.offending[0], 1);
  EXPECT_THROW(RequireValid(inst), Error);
}

TEST(ValidateTest, ShapeMismatchAndEmpty) {
  EcqpInstance inst = Ball(Matrix::Identity(2, 2), Vector::Zero(2));
  inst.ellipsoids[0].g = Vector::Zero(3);
  EXPECT_FALSE(Validate(inst).ok);
  inst.ellipsoids.clear();
  EXPECT_FALSE(Validate(inst).ok);
}

TEST(ValidateTest, AssignmentReductionGamma) {
  AsqpInstance a;
  a.n = 4;
  a.A = SymMatrix::Identity(16);
  a.b = Vector::Zero(16);
  const ValidationReport rep = Validate(ToEcqp(a).ecqp);
  EXPECT_TRUE(rep.ok);
  EXPECT_DOUBLE_EQ(rep.gamma, 0.5);
}

TEST(HomogenizeTest, ScalarObjective) {
  const HomogenizedProblem h =
      Homogenize(Ball(-Matrix::Identity(1, 1), Vector::Constant(1, 1.0)));
  Matrix expected(2, 2);
  expected << -1, 1, 1, 0;
  EXPECT_EQ(h.B.matrix(), expected);
}

TEST(HomogenizeTest, BallConstraint) {
  const HomogenizedProblem h = Homogenize(Ball(Matrix::Identity(2, 2), Vector::Zero(2)));
  Matrix expected = Matrix::Identity(3, 3);
  expected(2, 2) = -1;
  EXPECT_EQ(h.Bk[0].matrix(), expected);
}

TEST(HomogenizeTest, ShiftedInterval) {
  EcqpInstance inst = Ball(Matrix::Identity(1, 1), Vector::Zero(1));
  inst.ellipsoids[0].g = Vector::Constant(1, 0.5);
  Matrix expected(2, 2);
  expected << 1, 0.5, 0.5, -0.75;
  EXPECT_EQ(Homogenize(inst).Bk[0].matrix(), expected);
}

TEST(HomogenizeTest, RandomIdentity) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const EcqpInstance inst = RandomInstance(100 + trial, 1 + trial % 6, 1 + trial % 4);
    const HomogenizedProblem h = Homogenize(inst);
    EXPECT_EQ(h.B(inst.n(), inst.n()), 0.0);
    for (int s = 0; s < 100; ++s) {
      Vector x(inst.n());
      for (int i = 0; i < inst.n(); ++i) x(i) = normal(rng);
      Vector w(inst.n() + 1);
      w << x, 1.0;
      const double f = Objective(inst, x);
      EXPECT_NEAR(w.dot(h.B.matrix() * w), f, 1e-10 * (1.0 + std::abs(f)));
      for (int k = 0; k < inst.m(); ++k) {
        const double c = ConstraintValue(inst.ellipsoids[k], x);
        EXPECT_NEAR(w.dot(h.Bk[k].matrix() * w), c, 1e-10 * (1.0 + std::abs(c)));
        EXPECT_LT(h.Bk[k](inst.n(), inst.n()), 0.0);
      }
    }
  }
}

TEST(EvaluateTest, Examples) {
  const EcqpInstance inst = Ball(-Matrix::Identity(2, 2), Vector::Zero(2));
  Evaluation ev = Evaluate(inst, Vector::Zero(2));
  EXPECT_EQ(ev.objective, 0.0);
  EXPECT_EQ(ev.max_residual, 0.0);
  ev = Evaluate(inst, Vector::Unit(2, 0));
  EXPECT_EQ(ev.objective, -1.0);
  EXPECT_EQ(ev.max_residual, 0.0);
  EXPECT_TRUE(ev.feasible());
  ev = Evaluate(inst, 2.0 * Vector::Unit(2, 0));
  EXPECT_EQ(ev.residuals(0), 3.0);
  EXPECT_FALSE(ev.feasible());
}

TEST(EvaluateTest, OriginOnRandomInstances) {
  for (int seed = 0; seed < 50; ++seed) {
    const EcqpInstance inst = RandomInstance(seed, 1 + seed % 7, 1 + seed % 5);
    const Evaluation ev = Evaluate(inst, Vector::Zero(inst.n()));
    EXPECT_EQ(ev.objective, 0.0);
    EXPECT_EQ(ev.max_residual, 0.0);
    for (const auto& e : inst.ellipsoids) EXPECT_LT(ConstraintValue(e, Vector::Zero(inst.n())), 0.0);
  }
}

TEST(LargestFeasibleScaleTest, LandsOnBoundary) {
  for (int seed = 0; seed < 40; ++seed) {
    const EcqpInstance inst = RandomInstance(seed, 3, 3, {.gamma_max = 0.9});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 10.0);
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = normal(rng);
    const double tau = LargestFeasibleScale(inst.ellipsoids, x);
    ASSERT_GT(tau, 0.0);
    const Evaluation ev = Evaluate(inst, tau * x);
    EXPECT_LE(ev.max_residual, 1e-12);
    if (tau < 1.0) {
      double worst = -1.0;
      for (const auto& e : inst.ellipsoids) worst = std::max(worst, ConstraintValue(e, tau * x));
      EXPECT_NEAR(worst, 0.0, 1e-12);
    }
  }
}

TEST(RandomInstanceTest, BallSpec) {
  const EcqpInstance inst = RandomInstance(1, 2, 1, {.ball = true});
  ASSERT_EQ(inst.m(), 1);
  EXPECT_EQ(inst.ellipsoids[0].F, Matrix::Identity(2, 2));
  EXPECT_EQ(inst.ellipsoids[0].g, Vector::Zero(2));
  const SpectralFactorization eig = SymEig(inst.A);
  EXPECT_GT(eig.eigenvalues(0), 0.0);
  EXPECT_LT(eig.eigenvalues(1), 0.0);
}

TEST(RandomInstanceTest, Deterministic) {
  const EcqpInstance a = RandomInstance(42, 5, 3);
  const EcqpInstance b = RandomInstance(42, 5, 3);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.b, b.b);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(a.ellipsoids[k].F, b.ellipsoids[k].F);
    EXPECT_EQ(a.ellipsoids[k].g, b.ellipsoids[k].g);
  }
}

TEST(RandomInstanceTest, GammaAndBoundedness) {
  for (int seed = 0; seed < 100; ++seed) {
    const EcqpInstance inst = RandomInstance(seed, 1 + seed % 10, 1 + seed % 6, {.gamma_max = 0.9});
    const ValidationReport rep = Validate(inst);
    EXPECT_TRUE(rep.ok);
    EXPECT_LE(rep.gamma, 0.9);
    Matrix gram = Matrix::Zero(inst.n(), inst.n());
    for (const auto& e : inst.ellipsoids) gram += e.F.transpose() * e.F;
    EXPECT_GT(SymEig(gram).eigenvalues(inst.n() - 1), 0.0);
  }
}

TEST(RandomInstanceTest, RejectsBadSpec) {
  EXPECT_THROW(RandomInstance(1, 0, 1), Error);
  EXPECT_THROW(RandomInstance(1, 2, 0), Error);
  EXPECT_THROW(RandomInstance(1, 2, 1, {.gamma_max = 1.0}), Error);
}

}  // namespace
}  // namespace ecqp
