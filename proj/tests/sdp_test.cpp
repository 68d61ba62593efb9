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

#include "ecqp/sdp.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ecqp/asqp.hpp"
#include "ecqp/model.hpp"

namespace ecqp {
namespace {

EcqpInstance Ball(const Matrix& A, const Vector& b) {
  EcqpInstance inst;
  inst.A = SymMatrix::FromMatrix(A);
  inst.b = b;
  inst.ellipsoids.push_back({Matrix::Identity(A.rows(), A.rows()), Vector::Zero(A.rows())});
  return inst;
}

EcqpInstance ScalarInstance() { return Ball(-Matrix::Identity(1, 1), Vector::Constant(1, 1.0)); }

void ExpectOptimalInvariants(const ConicProgram& p, const SdpSolution& s, const SdpOptions& o) {
  ASSERT_EQ(s.status, SdpStatus::kOptimal);
  EXPECT_LE(s.gap, o.gap_tol);
  EXPECT_LE(s.primal_residual, o.feas_tol);
  EXPECT_GE(SymEig(s.X).eigenvalues(p.dim() - 1), -o.feas_tol);
  EXPECT_NEAR(s.X(p.dim() - 1, p.dim() - 1), 1.0, o.feas_tol);
  EXPECT_LE(s.v_sdp, o.feas_tol);
  for (int k = 0; k < p.num_inequalities(); ++k) EXPECT_GE(s.slacks(k), -o.feas_tol);
  EXPECT_LE(std::abs(s.complementarity), 10 * o.gap_tol * (1.0 + std::abs(s.v_sdp)));
  // Weak duality at the returned (feasible) point.
  EXPECT_GE(s.v_sdp - s.dual_objective, -1e-8 * (1.0 + std::abs(s.v_sdp)));
}

TEST(BuildRelaxationTest, Dimensions) {
  const ConicProgram p = BuildRelaxation(Homogenize(ScalarInstance()));
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.num_inequalities(), 1);
  EXPECT_EQ(p.num_constraints(), 2);
  EXPECT_EQ(p.equality(1, 1), 1.0);
  EXPECT_EQ(p.equality.frobenius_norm(), 1.0);
}

TEST(BuildRelaxationTest, AssignmentReductionDimensions) {
  AsqpInstance a;
  a.n = 2;
  a.A = SymMatrix::Identity(4);
  a.b = Vector::Zero(4);
  const ConicProgram p = BuildRelaxation(Homogenize(ToEcqp(a).ecqp));
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.num_inequalities(), 4);
}

TEST(BuildRelaxationTest, LiftedFeasiblePoints) {
  for (int seed = 0; seed < 20; ++seed) {
    const EcqpInstance inst = RandomInstance(seed, 4, 3, {.gamma_max = 0.8});
    const ConicProgram p = BuildRelaxation(Homogenize(inst));
    // The origin lifts to e e^T with slacks 1 - ||g||^2.
    SymMatrix E(p.dim());
    E.set(p.dim() - 1, p.dim() - 1, 1.0);
    for (int k = 0; k < inst.m(); ++k) {
      EXPECT_NEAR(-Inner(p.inequalities[k], E), 1.0 - inst.ellipsoids[k].g.squaredNorm(), 1e-15);
    }
    // A feasible boundary point lifts to a feasible rank-one X.
    Vector x = Vector::LinSpaced(4, -1.0, 2.0);
    x *= LargestFeasibleScale(inst.ellipsoids, x);
    Vector w(5);
    w << x, 1.0;
    const SymMatrix X = SymMatrix::Symmetrized(w * w.transpose());
    EXPECT_NEAR(Inner(p.equality, X), 1.0, 1e-15);
    for (int k = 0; k < inst.m(); ++k) EXPECT_LE(Inner(p.inequalities[k], X), 1e-10);
    EXPECT_NEAR(Inner(p.objective, X), Objective(inst, x), 1e-10);
  }
}

TEST(SolveSdpTest, ScalarInstanceMatchesGrid) {
  // Minimum of -x^2 + 2x over [-1, 1] is -3 at x = -1.
  const EcqpInstance inst = ScalarInstance();
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SdpOptions opts;
  const SdpSolution s = SolveSdp(p, opts);
  ExpectOptimalInvariants(p, s, opts);
  EXPECT_NEAR(s.v_sdp, -3.0, 1e-6);
  EXPECT_EQ(s.rank, 1);
  EXPECT_NEAR(s.X(0, 1) / s.X(1, 1), -1.0, 1e-6);
}

TEST(SolveSdpTest, NegativeIdentityOnBall) {
  const EcqpInstance inst = Ball(-Matrix::Identity(2, 2), Vector::Zero(2));
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SdpSolution s = SolveSdp(p);
  ExpectOptimalInvariants(p, s, {});
  EXPECT_NEAR(s.v_sdp, -1.0, 1e-7);
}

TEST(SolveSdpTest, ConvexObjectiveHasOriginOptimum) {
  const EcqpInstance inst = Ball(Matrix::Identity(2, 2), Vector::Zero(2));
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SdpSolution s = SolveSdp(p);
  ExpectOptimalInvariants(p, s, {});
  EXPECT_NEAR(s.v_sdp, 0.0, 1e-7);
  Matrix expected = Matrix::Zero(3, 3);
  expected(2, 2) = 1.0;
  EXPECT_LE((s.X.matrix() - expected).norm(), 1e-6);
}

TEST(SolveSdpTest, RandomInstancesReachOptimality) {
  const SdpOptions opts;
  for (int seed = 0; seed < 30; ++seed) {
    const EcqpInstance inst =
        RandomInstance(500 + seed, 2 + seed % 6, 1 + seed % 5, {.gamma_max = 0.3 * (seed % 3)});
    const ConicProgram p = BuildRelaxation(Homogenize(inst));
    const SdpSolution s = SolveSdp(p, opts);
    ExpectOptimalInvariants(p, s, opts);
    // v_sdp <= f(x) for feasible points, e.g. scaled random directions.
    for (int t = 0; t < 5; ++t) {
      Vector x = Vector::LinSpaced(inst.n(), -1.0 + t, 1.0 - 2 * t);
      x *= LargestFeasibleScale(inst.ellipsoids, x);
      EXPECT_LE(s.v_sdp, Objective(inst, x) + 1e-6);
    }
  }
}

TEST(SolveSdpTest, Deterministic) {
  const EcqpInstance inst = RandomInstance(3, 5, 3);
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SdpSolution a = SolveSdp(p);
  const SdpSolution b = SolveSdp(p);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(a.v_sdp, b.v_sdp);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveSdpTest, IterationCapReportsMaxIter) {
  const EcqpInstance inst = RandomInstance(4, 5, 3);
  SdpOptions opts;
  opts.max_iter = 2;
  const SdpSolution s = SolveSdp(BuildRelaxation(Homogenize(inst)), opts);
  EXPECT_EQ(s.status, SdpStatus::kMaxIter);
  EXPECT_EQ(s.X.dim(), 6);
}

TEST(SdpStatusTest, RoundTrip) {
  for (SdpStatus s : {SdpStatus::kOptimal, SdpStatus::kMaxIter, SdpStatus::kNumericalFailure}) {
    EXPECT_EQ(SdpStatusFromString(ToString(s)), s);
  }
  EXPECT_EQ(ToString(SdpStatus::kNumericalFailure), "numerical_failure");
  EXPECT_THROW(SdpStatusFromString("bogus"), Error);
}

TEST(SolutionFromPrimalTest, RecomputesObjectiveAndSlacks) {
  const EcqpInstance inst = ScalarInstance();
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  Matrix X(2, 2);
  X << 1, -1, -1, 1;
  const SdpSolution s =
      SolutionFromPrimal(p, SymMatrix::FromMatrix(X), SdpStatus::kOptimal, 0.0);
  EXPECT_DOUBLE_EQ(s.v_sdp, -3.0);
  EXPECT_DOUBLE_EQ(s.slacks(0), 0.0);
  EXPECT_EQ(s.rank, 1);
}

}  // namespace
}  // namespace ecqp
