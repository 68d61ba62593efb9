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

// Quadratic programs with ellipsoid constraints:
//
//   min  x^T A x + 2 b^T x   s.t.  ||F^k x + g^k||^2 <= 1,  k = 1..m.
//
// The origin is required to be strictly feasible (||g^k|| < 1).

#ifndef ECQP_MODEL_HPP_
#define ECQP_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecqp/linalg.hpp"

namespace ecqp {

struct Ellipsoid {
  Matrix F;  // r x n, r >= 1
  Vector g;  // r
};

struct EcqpInstance {
  SymMatrix A;
  Vector b;
  std::vector<Ellipsoid> ellipsoids;
  // Constant added to the objective for reporting only.
  double offset = 0.0;

  int n() const { return static_cast<int>(b.size()); }
  int m() const { return static_cast<int>(ellipsoids.size()); }
};

/// B = [[A, b], [b^T, 0]] and B^k = [[F^T F, F^T g], [g^T F, |g|^2 - 1]].
struct HomogenizedProblem {
  SymMatrix B;
  std::vector<SymMatrix> Bk;
};

inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kInteriorMargin = 1e-10;

struct ValidationReport {
  bool ok = true;
  double gamma = 0.0;           // max_k ||g^k||
  std::vector<int> offending;   // constraint indices violating ||g^k|| < 1
  std::vector<std::string> issues;
};

inline ValidationReport Validate(const EcqpInstance& inst) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.issues.push_back(msg);
  };
  const Eigen::Index n = inst.b.size();
  if (n < 1) fail("dimension n must be >= 1");
  if (inst.A.dim() != n) fail("A must be n x n");
  if (!inst.A.matrix().allFinite() || !inst.b.allFinite()) fail("non-finite objective data");
  if (!std::isfinite(inst.offset)) fail("non-finite offset");
  if (inst.ellipsoids.empty()) fail("at least one ellipsoid constraint is required");
  for (std::size_t k = 0; k < inst.ellipsoids.size(); ++k) {
    const Ellipsoid& e = inst.ellipsoids[k];
    std::ostringstream tag;
    tag << "ellipsoid " << k << ": ";
    if (e.F.rows() < 1 || e.F.cols() != n || e.g.size() != e.F.rows()) {
      fail(tag.str() + "shape mismatch");
      rep.offending.push_back(static_cast<int>(k));
      continue;
    }
    if (!e.F.allFinite() || !e.g.allFinite()) {
      fail(tag.str() + "non-finite entry");
      rep.offending.push_back(static_cast<int>(k));
      continue;
    }
    const double gn = e.g.norm();
    rep.gamma = std::max(rep.gamma, gn);
    if (!(gn < 1.0 - kInteriorMargin)) {
      std::ostringstream os;
      os << tag.str() << "||g|| = " << gn << " leaves the origin outside the interior";
      fail(os.str());
      rep.offending.push_back(static_cast<int>(k));
    }
  }
  return rep;
}

inline void RequireValid(const EcqpInstance& inst) {
  const ValidationReport rep = Validate(inst);
  if (rep.ok) return;
  std::string msg = "invalid instance:";
  for (const auto& s : rep.issues) msg += " [" + s + "]";
  throw InputError(msg);
}

inline double Gamma(const EcqpInstance& inst) {
  double g = 0.0;
  for (const auto& e : inst.ellipsoids) g = std::max(g, e.g.norm());
  return g;
}

inline HomogenizedProblem Homogenize(const EcqpInstance& inst) {
  const Eigen::Index n = inst.n();
  HomogenizedProblem h;
  Matrix B = Matrix::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = inst.A.matrix();
  B.topRightCorner(n, 1) = inst.b;
  B.bottomLeftCorner(1, n) = inst.b.transpose();
  h.B = SymMatrix::FromMatrix(B);
  h.Bk.reserve(inst.ellipsoids.size());
  for (const auto& e : inst.ellipsoids) {
    Matrix Bk(n + 1, n + 1);
    Bk.topLeftCorner(n, n) = e.F.transpose() * e.F;
    const Vector ftg = e.F.transpose() * e.g;
    Bk.topRightCorner(n, 1) = ftg;
    Bk.bottomLeftCorner(1, n) = ftg.transpose();
    Bk(n, n) = e.g.squaredNorm() - 1.0;
    h.Bk.push_back(SymMatrix::Symmetrized(Bk));
  }
  return h;
}

struct Evaluation {
  double objective = 0.0;   // x^T A x + 2 b^T x, offset excluded
  Vector residuals;         // max(0, ||F^k x + g^k||^2 - 1)
  double max_residual = 0.0;

  bool feasible(double tol = kFeasibilityTol) const { return max_residual <= tol; }
};

inline double Objective(const EcqpInstance& inst, const Vector& x) {
  return x.dot(inst.A.matrix() * x) + 2.0 * inst.b.dot(x);
}

inline double ConstraintValue(const Ellipsoid& e, const Vector& x) {
  return (e.F * x + e.g).squaredNorm() - 1.0;
}

inline Evaluation Evaluate(const EcqpInstance& inst, const Vector& x) {
  if (x.size() != inst.n()) throw InputError("Evaluate: point has the wrong dimension");
  Evaluation ev;
  ev.objective = Objective(inst, x);
  ev.residuals.resize(inst.m());
  for (int k = 0; k < inst.m(); ++k) {
    ev.residuals(k) = std::max(0.0, ConstraintValue(inst.ellipsoids[k], x));
    ev.max_residual = std::max(ev.max_residual, ev.residuals(k));
  }
  return ev;
}

/// Largest tau in [0, 1] with tau * x feasible. Each constraint gives the
/// quadratic a tau^2 + 2 b tau + c <= 0 with c = |g|^2 - 1 < 0, whose
/// positive root is taken in the cancellation-free form.
inline double LargestFeasibleScale(const std::vector<Ellipsoid>& ellipsoids, const Vector& x) {
  double tau = 1.0;
  for (const auto& e : ellipsoids) {
    const Vector fx = e.F * x;
    const double a = fx.squaredNorm();
    if (a <= 1e-14) continue;
    const double b = fx.dot(e.g);
    const double c = e.g.squaredNorm() - 1.0;
    const double disc = std::sqrt(std::max(0.0, b * b - a * c));
    const double root = b >= 0.0 ? -c / (b + disc) : (-b + disc) / a;
    tau = std::min(tau, root);
  }
  return std::max(0.0, tau);
}

struct RandomSpec {
  double gamma_max = 0.5;   // ||g^k|| <= gamma_max < 1
  bool bounded = true;      // make sum_k F^T F positive definite
  bool ball = false;        // F^k = I, g^k = 0 (trust-region type)
  bool convex = false;      // draw A positive definite instead of indefinite
  bool zero_b = false;
  int max_rows = -1;        // rows per F^k drawn from [1, max_rows]; -1 means n
};

/// Deterministic in (seed, n, m, spec). A = Q D Q^T with D of mixed sign.
inline EcqpInstance RandomInstance(std::uint64_t seed, int n, int m, const RandomSpec& spec = {}) {
  if (n < 1 || m < 1) throw InputError("RandomInstance: n and m must be >= 1");
  if (!(spec.gamma_max >= 0.0 && spec.gamma_max < 1.0)) {
    throw InputError("RandomInstance: gamma_max must lie in [0, 1)");
  }
  const int max_rows = spec.max_rows < 0 ? n : spec.max_rows;
  if (max_rows < 1) throw InputError("RandomInstance: max_rows must be >= 1");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Matrix g(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) g(i, j) = normal(rng);
    return g;
  };

  EcqpInstance inst;
  const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian(n, n)).householderQ();
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = 2.0 * unif(rng) - 1.0;
  if (spec.convex) {
    d = d.cwiseAbs().array() + 0.1;
  } else {
    d(0) = -(0.1 + std::abs(d(0)));
    if (n >= 2) d(1) = 0.1 + std::abs(d(1));
  }
  inst.A = SymMatrix::Symmetrized(q * d.asDiagonal() * q.transpose());
  inst.b = spec.zero_b ? Vector::Zero(n) : Vector(gaussian(n, 1));

  for (int k = 0; k < m; ++k) {
    Ellipsoid e;
    if (spec.ball) {
      e.F = Matrix::Identity(n, n);
      e.g = Vector::Zero(n);
    } else {
      const int rows = 1 + static_cast<int>(unif(rng) * max_rows) % max_rows;
      e.F = gaussian(rows, n) / std::sqrt(static_cast<double>(n));
      Vector g = gaussian(rows, 1);
      const double scale = spec.gamma_max * unif(rng);
      e.g = g.norm() > 0.0 ? Vector(g * (scale / g.norm())) : Vector::Zero(rows);
    }
    inst.ellipsoids.push_back(std::move(e));
  }

  if (spec.bounded && !spec.ball) {
    Matrix gram = Matrix::Zero(n, n);
    for (const auto& e : inst.ellipsoids) gram += e.F.transpose() * e.F;
    const double lmin = SymEig(gram).eigenvalues(n - 1);
    if (lmin < 1e-2) {
      // Append full-rank rows to the first ellipsoid; its g is padded with 0.
      Ellipsoid& e = inst.ellipsoids.front();
      const Eigen::Index r = e.F.rows();
      Matrix F(r + n, n);
      F << e.F, 0.5 * Matrix::Identity(n, n);
      Vector g = Vector::Zero(r + n);
      g.head(r) = e.g;
      e.F = std::move(F);
      e.g = std::move(g);
    }
  }
  return inst;
}

}  // namespace ecqp

#endif  // ECQP_MODEL_HPP_
