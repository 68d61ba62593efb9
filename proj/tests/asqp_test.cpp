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

#include "ecqp/asqp.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ecqp/oracle.hpp"

namespace ecqp {
namespace {

AsqpInstance NegativeIdentity(int n) {
  AsqpInstance a;
  a.n = n;
  a.A = SymMatrix::FromMatrix(-Matrix::Identity(n * n, n * n));
  a.b = Vector::Zero(n * n);
  return a;
}

AsqpInstance RandomAsqp(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int nn = n * n;
  Matrix M(nn, nn);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) M(i, j) = normal(rng);
  AsqpInstance a;
  a.n = n;
  a.A = SymMatrix::Symmetrized(M);
  a.b = Vector(nn);
  for (int i = 0; i < nn; ++i) a.b(i) = normal(rng);
  return a;
}

Matrix Reshape(const Vector& v, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

TEST(NullspaceBasisTest, TwoByTwo) {
  const Matrix N = NullspaceBasis(2);
  ASSERT_EQ(N.rows(), 4);
  ASSERT_EQ(N.cols(), 1);
  Vector expected(4);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(Vector(N.col(0)), expected);
  const Matrix X = Reshape(N.col(0), 2);
  EXPECT_EQ(X.rowwise().sum(), Vector::Zero(2));
  EXPECT_EQ(X.colwise().sum(), Vector::Zero(2).transpose());
}

TEST(NullspaceBasisTest, ExactSumsAndRank) {
  for (int n = 2; n <= 7; ++n) {
    const Matrix N = NullspaceBasis(n);
    ASSERT_EQ(N.rows(), n * n);
    ASSERT_EQ(N.cols(), (n - 1) * (n - 1));
    for (Eigen::Index c = 0; c < N.cols(); ++c) {
      const Matrix X = Reshape(N.col(c), n);
      // Integer entries: sums are exact.
      EXPECT_EQ(X.rowwise().sum().cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ(X.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
    }
    EXPECT_EQ((Vector::Ones(n * n).transpose() * N).cwiseAbs().maxCoeff(), 0.0);
    Eigen::FullPivLU<Matrix> lu(N);
    EXPECT_EQ(lu.rank(), (n - 1) * (n - 1));
  }
  EXPECT_THROW(NullspaceBasis(1), Error);
}

TEST(ToEcqpTest, GammaAndDimensions) {
  for (int n : {2, 3, 4, 5}) {
    const AsqpReduction red = ToEcqp(NegativeIdentity(n));
    EXPECT_EQ(red.ecqp.m(), n * n);
    EXPECT_EQ(red.ecqp.n(), (n - 1) * (n - 1));
    EXPECT_NEAR(Gamma(red.ecqp), 1.0 - 2.0 / n, 1e-15);
    EXPECT_TRUE(Validate(red.ecqp).ok);
  }
}

TEST(ToEcqpTest, NegativeIdentityTwo) {
  const AsqpReduction red = ToEcqp(NegativeIdentity(2));
  EXPECT_EQ(red.ecqp.A(0, 0), -4.0);
  EXPECT_EQ(red.ecqp.b(0), 0.0);
  EXPECT_EQ(red.h0, -1.0);
}

TEST(ToEcqpTest, LiftPreservesObjective) {
  for (int seed = 0; seed < 10; ++seed) {
    const int n = 2 + seed % 4;
    const AsqpInstance a = RandomAsqp(seed, n);
    const AsqpReduction red = ToEcqp(a);
    std::mt19937_64 rng(seed + 100);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      Vector y(red.ecqp.n());
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = normal(rng);
      const Vector x = Vector::Constant(n * n, 1.0 / n) + red.N * y;
      const double f = x.dot(a.A.matrix() * x) + 2.0 * a.b.dot(x);
      const double h = red.h0 + Objective(red.ecqp, y);
      EXPECT_NEAR(f, h, 1e-10 * (1.0 + std::abs(f)));
    }
  }
}

TEST(ToEcqpTest, BoxEquivalence) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 0.4);
  for (int n : {2, 3, 4}) {
    const AsqpReduction red = ToEcqp(NegativeIdentity(n));
    for (int t = 0; t < 500; ++t) {
      Vector y(red.ecqp.n());
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = normal(rng);
      const Vector x = Vector::Constant(n * n, 1.0 / n) + red.N * y;
      for (int k = 0; k < n * n; ++k) {
        const double c = ConstraintValue(red.ecqp.ellipsoids[k], y);
        const double ny = red.N.row(k).dot(y);
        const bool in_box = x(k) >= 0.0 && x(k) <= 1.0;
        const bool in_band = ny >= -1.0 / n && ny <= 1.0 - 1.0 / n;
        // Points within rounding of the boundary are ambiguous.
        if (std::abs(c) < 1e-12) continue;
        EXPECT_EQ(c <= 0.0, in_box);
        EXPECT_EQ(in_band, in_box);
      }
    }
  }
}

TEST(GFunctionTest, TwoByTwo) {
  EXPECT_NEAR(GFunction(2), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(FuBound(2), 0.9375);
  EXPECT_GT(FuBound(2), 1.0 - GFunction(2));
  EXPECT_THROW(GFunction(1), Error);
}

TEST(GFunctionTest, SweepChain) {
  for (int n = 2; n <= 10000; ++n) {
    const double g = GFunction(n);
    const double nd = n;
    ASSERT_GT(g, 1.0 / (nd * nd * nd)) << n;
    ASSERT_LT(1.0 - g, 1.0 - g / 2.0) << n;
    ASSERT_GT(FuBound(n), 1.0 - g / 2.0) << n;
    ASSERT_LT(1.0 - g, FuBound(n)) << n;
  }
}

TEST(QualityMetricsTest, Endpoints) {
  EXPECT_EQ(QualityMetrics(-2.0, -2.0, -1.0, 2).epsilon, 0.0);
  EXPECT_EQ(QualityMetrics(-1.0, -2.0, -1.0, 2).epsilon, 1.0);
  EXPECT_EQ(QualityMetrics(0.0, 0.0, 0.0, 2).epsilon, 0.0);
  const AsqpQuality q = QualityMetrics(-2.0, -2.0, -1.0, 2);
  EXPECT_TRUE(q.within_guarantee);
  EXPECT_TRUE(q.g_exceeds_inverse_cube);
  EXPECT_TRUE(q.improves_fu);
}

TEST(SolveAsqpTest, NegativeIdentityTwo) {
  const AsqpResult r = SolveAsqp(NegativeIdentity(2));
  ASSERT_EQ(r.y.size(), 1);
  EXPECT_NEAR(std::abs(r.y(0)), 0.5, 1e-6);
  EXPECT_NEAR(r.f_x, -2.0, 1e-6);
  EXPECT_NEAR(r.h0, -1.0, 1e-15);
  EXPECT_NEAR(r.v_sdp_shifted, -1.0, 1e-6);
  EXPECT_TRUE(r.guarantee_holds);
  EXPECT_LE(r.f_x, r.guarantee_rhs + 1e-6);
  EXPECT_LE(r.max_sum_error, 1e-15);
  EXPECT_GE(r.min_entry, -1e-9);
  EXPECT_LE(r.max_entry, 1.0 + 1e-9);
  // A permutation matrix.
  EXPECT_NEAR(r.x.cwiseAbs().maxCoeff(), 1.0, 1e-6);
  const PolytopeExtrema ex = EstimatePolytopeExtrema(NegativeIdentity(2), 1);
  const AsqpQuality q = QualityMetrics(r.f_x, ex.p_lower, ex.p_upper, 2);
  EXPECT_NEAR(q.epsilon, 0.0, 1e-6);
  EXPECT_TRUE(q.within_guarantee);
}

TEST(SolveAsqpTest, RandomInstancesAreDoublyStochastic) {
  for (int seed = 0; seed < 8; ++seed) {
    const int n = 2 + seed % 3;
    const AsqpResult r = SolveAsqp(RandomAsqp(seed, n));
    EXPECT_TRUE(r.guarantee_holds) << seed;
    EXPECT_LE(r.max_sum_error, 1e-12);
    EXPECT_GE(r.min_entry, -1e-8);
    EXPECT_LE(r.max_entry, 1.0 + 1e-8);
  }
}

}  // namespace
}  // namespace ecqp
