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

#include "ecqp/facered.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ecqp/model.hpp"
#include "ecqp/sdp.hpp"

namespace ecqp {
namespace {

// Smallest r with m + 1 <= (r + 2)(r + 1)/2 - 1, by linear search.
std::int64_t RankBoundBySearch(std::int64_t m) {
  std::int64_t r = 1;
  while ((r + 2) * (r + 1) / 2 - 1 < m + 1) ++r;
  return r;
}

TEST(RankBoundTest, Examples) {
  EXPECT_EQ(RankBound(1), 1);
  EXPECT_EQ(RankBound(2), 2);
  EXPECT_EQ(RankBound(3), 2);
  EXPECT_EQ(RankBound(323), 24);
  EXPECT_EQ(RankBound(100), 13);
}

TEST(RankBoundTest, MatchesDimensionCount) {
  for (std::int64_t m = 1; m <= 200000; ++m) ASSERT_EQ(RankBound(m), RankBoundBySearch(m)) << m;
}

TEST(RankBoundTest, PerfectSquareBoundaries) {
  // 8m + 17 = k^2 for odd k puts the closed form exactly on an integer.
  for (std::int64_t k = 5; k < 3000001; k += 2) {
    if ((k * k - 17) % 8 != 0) continue;
    const std::int64_t m = (k * k - 17) / 8;
    if (m < 1) continue;
    ASSERT_EQ(RankBound(m), (k - 3) / 2) << m;
    ASSERT_EQ(RankBound(m + 1), (k - 3) / 2 + 1) << m + 1;
  }
}

TEST(RankBoundTest, LargeArguments) {
  for (std::int64_t m : {std::int64_t{1} << 40, (std::int64_t{1} << 50) + 7, std::int64_t{999999999999}}) {
    const std::int64_t r = RankBound(m);
    EXPECT_GE((r + 2) * (r + 1) / 2 - 1, m + 1);
    EXPECT_LT((r + 1) * r / 2 - 1, m + 1);
  }
}

TEST(RankBudgetTest, Invariants) {
  for (int m = 1; m <= 500; ++m) {
    const RankBudget b = RankBudget::For(m);
    EXPECT_GE(b.r0, 1);
    EXPECT_LE(m + 1, (b.r0 + 2) * (b.r0 + 1) / 2 - 1);
  }
}

// m copies of the unit ball with A = -I_n: every X = [[Y, 0], [0, 1]] with
// tr Y = 1 is optimal, and the interior-point solution has full rank.
EcqpInstance FlatFace(int n, int m) {
  EcqpInstance inst;
  inst.A = SymMatrix::FromMatrix(-Matrix::Identity(n, n));
  inst.b = Vector::Zero(n);
  for (int k = 0; k < m; ++k) {
    inst.ellipsoids.push_back({Matrix::Identity(n, n), Vector::Zero(n)});
  }
  return inst;
}

void ExpectFaceMove(const ConicProgram& p, const SdpSolution& in, const SdpSolution& out) {
  EXPECT_NEAR(out.v_sdp, in.v_sdp, 1e-7 * (1.0 + std::abs(in.v_sdp)));
  for (int i = 0; i < p.num_constraints(); ++i) {
    EXPECT_NEAR(Inner(p.constraint(i), out.X), Inner(p.constraint(i), in.X), 1e-8);
  }
  EXPECT_GE(SymEig(out.X).eigenvalues(p.dim() - 1), -1e-9);
  EXPECT_LE((out.factor * out.factor.transpose() - out.X.matrix()).norm(), 1e-12);
}

TEST(ReduceRankTest, SingleBallReachesRankOne) {
  const EcqpInstance inst = FlatFace(4, 1);
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SdpSolution sol = SolveSdp(p);
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  FaceReductionTrace trace;
  const SdpSolution red = ReduceRank(sol, p, {}, &trace);
  EXPECT_EQ(trace.initial_rank, 5);
  EXPECT_EQ(red.rank, 1);
  EXPECT_LE(trace.iterations, trace.initial_rank - 1);
  ExpectFaceMove(p, sol, red);
}

TEST(ReduceRankTest, FourConstraintsReachTwo) {
  const EcqpInstance inst = FlatFace(5, 4);
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SdpSolution sol = SolveSdp(p);
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  const SdpSolution red = ReduceRank(sol, p);
  EXPECT_LE(red.rank, 2);
  ExpectFaceMove(p, sol, red);
}

TEST(ReduceRankTest, ScalarInstanceIsUnchanged) {
  EcqpInstance inst;
  inst.A = SymMatrix::FromMatrix(-Matrix::Identity(1, 1));
  inst.b = Vector::Constant(1, 1.0);
  inst.ellipsoids.push_back({Matrix::Identity(1, 1), Vector::Zero(1)});
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  // The exact optimum w w^T with w = (-1, 1) has rank 1 = r0(1).
  Vector w(2);
  w << -1.0, 1.0;
  const SdpSolution sol =
      SolutionFromPrimal(p, SymMatrix::FromMatrix(w * w.transpose()), SdpStatus::kOptimal, 0.0);
  FaceReductionTrace trace;
  const SdpSolution red = ReduceRank(sol, p, {}, &trace);
  EXPECT_EQ(trace.iterations, 0);
  EXPECT_EQ(red.rank, 1);
  EXPECT_EQ(red.X, sol.X);
  EXPECT_EQ(red.v_sdp, -3.0);

  // The interior-point optimum carries a tiny second eigenvalue; the
  // reduction removes it without moving the objective.
  const SdpSolution ipm = SolveSdp(p);
  const SdpSolution ipm_red = ReduceRank(ipm, p);
  EXPECT_EQ(ipm_red.rank, 1);
  EXPECT_LE((ipm_red.X.matrix() - ipm.X.matrix()).norm(), 1e-8);
  EXPECT_NEAR(ipm_red.v_sdp, -3.0, 1e-6);
}

TEST(ReduceRankTest, SyntheticHighRankOptimum) {
  // A convex combination of rank-one optima is optimal; build one of rank n+1.
  const int n = 6;
  const EcqpInstance inst = FlatFace(n, 3);
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  Matrix X = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) X(i, i) = (i + 1.0) / (n * (n + 1) / 2.0);
  X(n, n) = 1.0;
  const SdpSolution sol = SolutionFromPrimal(p, SymMatrix::FromMatrix(X), SdpStatus::kOptimal, 0.0);
  EXPECT_NEAR(sol.v_sdp, -1.0, 1e-14);
  FaceReductionTrace trace;
  const SdpSolution red = ReduceRank(sol, p, {}, &trace);
  EXPECT_EQ(trace.initial_rank, n + 1);
  EXPECT_LE(red.rank, RankBound(3));
  ExpectFaceMove(p, sol, red);
}

TEST(ReduceRankTest, RandomInstancesMeetBound) {
  for (int seed = 0; seed < 40; ++seed) {
    const int n = 2 + seed % 9;
    const int m = 1 + seed % 10;
    const EcqpInstance inst = RandomInstance(900 + seed, n, m, {.gamma_max = 0.45 * (seed % 3)});
    const ConicProgram p = BuildRelaxation(Homogenize(inst));
    const SdpSolution sol = SolveSdp(p);
    ASSERT_EQ(sol.status, SdpStatus::kOptimal);
    FaceReductionTrace trace;
    const SdpSolution red = ReduceRank(sol, p, {}, &trace);
    EXPECT_LE(red.rank, RankBound(m)) << "seed " << seed;
    EXPECT_LE(trace.iterations, std::max(0, trace.initial_rank - 1));
    ExpectFaceMove(p, sol, red);
  }
}

}  // namespace
}  // namespace ecqp
