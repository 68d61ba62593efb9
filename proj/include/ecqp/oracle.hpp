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

// Reference values for small instances: exact one-dimensional grids and
// multistart local search. These give upper bounds on the ECQP optimum
// (exact only in one dimension) and inner estimates of the extreme values of
// a quadratic over the Birkhoff polytope.

#ifndef ECQP_ORACLE_HPP_
#define ECQP_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ecqp/asqp.hpp"
#include "ecqp/model.hpp"

namespace ecqp {

enum class OracleMethod { kGrid1d, kMultistart, kVertexEnum };

inline std::string ToString(OracleMethod m) {
  switch (m) {
    case OracleMethod::kGrid1d: return "grid1d";
    case OracleMethod::kMultistart: return "multistart";
    case OracleMethod::kVertexEnum: return "vertex_enum";
  }
  return "unknown";
}

struct OracleBudget {
  int starts = 200;
  int iterations = 500;
  int grid_points = 1000000;
};

struct OracleEstimate {
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_point;
  OracleMethod method = OracleMethod::kMultistart;
  std::int64_t samples = 0;
  bool is_exact = false;
};

namespace detail {

// Minimizes a x^2 + 2 b x (plus the constant c) over [lo, hi] on a uniform
// grid, adding the endpoints and the stationary point so the minimum is exact.
template <typename F>
inline std::pair<double, double> GridMinimize(F&& f, double lo, double hi, double stationary,
                                              int points, std::int64_t* samples) {
  double best_x = lo;
  double best = f(lo);
  auto visit = [&](double x) {
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  };
  for (int i = 0; i <= points; ++i) visit(lo + (hi - lo) * (static_cast<double>(i) / points));
  visit(hi);
  if (std::isfinite(stationary) && stationary >= lo && stationary <= hi) visit(stationary);
  *samples += points + 3;
  return {best_x, best};
}

inline std::mt19937_64 StartRng(std::uint64_t seed, std::uint64_t start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(start >> 32)};
  return std::mt19937_64(seq);
}

// Log-barrier descent: f(x) - mu * sum_k log(1 - ||F_k x + g_k||^2) for a
// decreasing mu. Each Newton direction uses |eigenvalues| of the Hessian so
// it is a descent direction even where f is concave; the step is halved
// until the trial point is strictly feasible and the barrier value drops.
// Requires a strictly feasible start. A large `mu_start` (relative to the
// data scale) follows the central path; a small one stays near the start.
inline Vector LocalDescent(const EcqpInstance& inst, Vector x, int iterations,
                           double mu_start) {
  const Matrix& A = inst.A.matrix();
  const int n = inst.n();
  const std::size_t m = inst.ellipsoids.size();
  std::vector<Vector> r(m);
  std::vector<double> slack(m);
  auto slacks_ok = [&](const Vector& y) {
    for (std::size_t k = 0; k < m; ++k) {
      r[k] = inst.ellipsoids[k].F * y + inst.ellipsoids[k].g;
      slack[k] = 1.0 - r[k].squaredNorm();
      if (!(slack[k] > 0.0)) return false;
    }
    return true;
  };
  auto barrier = [&](const Vector& y, double mu) {
    double v = Objective(inst, y);
    for (std::size_t k = 0; k < m; ++k) v -= mu * std::log(slack[k]);
    return v;
  };
  if (!slacks_ok(x)) return Vector::Zero(n);

  const double f_scale = 1.0 + A.norm() + inst.b.norm();
  const double mu_min = 1e-14 * f_scale;
  double mu = mu_start * f_scale;
  int used = 0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  while (used < iterations) {
    for (int inner = 0; inner < 60 && used < iterations; ++inner, ++used) {
      slacks_ok(x);
      Vector grad = 2.0 * (A * x + inst.b);
      Matrix H = 2.0 * A;
      for (std::size_t k = 0; k < m; ++k) {
        const Matrix& F = inst.ellipsoids[k].F;
        const Vector q = F.transpose() * r[k];
        grad += (2.0 * mu / slack[k]) * q;
        H.noalias() += (2.0 * mu / slack[k]) * (F.transpose() * F);
        H.noalias() += (4.0 * mu / (slack[k] * slack[k])) * (q * q.transpose());
      }
      eig.compute(H);
      const Vector& lam = eig.eigenvalues();
      const double floor = 1e-12 * (1.0 + lam.cwiseAbs().maxCoeff());
      const Vector coef = eig.eigenvectors().transpose() * grad;
      Vector d = Vector::Zero(n);
      for (int i = 0; i < n; ++i) {
        d -= (coef(i) / std::max(std::abs(lam(i)), floor)) * eig.eigenvectors().col(i);
      }
      // Leave a saddle along the most negative curvature.
      if (lam(0) < -floor) {
        const Vector v = eig.eigenvectors().col(0);
        const double scale = std::sqrt(std::max(-grad.dot(d), 0.0) + 1e-12);
        d += (v.dot(grad) > 0.0 ? -scale : scale) * v / std::sqrt(-lam(0));
      }
      const double slope = grad.dot(d);
      if (!(slope < 0.0)) break;
      const double phi = barrier(x, mu);
      if (-slope <= 1e-15 * (1.0 + std::abs(phi))) break;
      bool moved = false;
      for (double t = 1.0; t > 1e-20; t *= 0.5) {
        const Vector trial = x + t * d;
        if (!slacks_ok(trial)) continue;
        if (barrier(trial, mu) <= phi + 1e-4 * t * slope) {
          x = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
      if (x.norm() > 1e8) return x * LargestFeasibleScale(inst.ellipsoids, x);
    }
    if (mu <= mu_min) break;
    mu = std::max(0.1 * mu, mu_min);
  }
  // Strictly feasible by construction; the retraction only guards rounding.
  return x * LargestFeasibleScale(inst.ellipsoids, x);
}

}  // namespace detail

/// Best feasible point found for an ECQP instance. Exact for n = 1 (grid
/// with endpoints and stationary point); multistart descent otherwise.
/// Deterministic in `seed`; per-start streams do not depend on the budget.
inline OracleEstimate BestFeasibleSearch(const EcqpInstance& inst, std::uint64_t seed,
                                         const OracleBudget& budget = {}) {
  RequireValid(inst);
  OracleEstimate est;
  if (inst.n() == 1) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& e : inst.ellipsoids) {
      const double a = e.F.squaredNorm();
      if (a <= 0.0) continue;
      const double b = e.F.col(0).dot(e.g);
      const double c = e.g.squaredNorm() - 1.0;
      const double disc = std::sqrt(b * b - a * c);
      lo = std::max(lo, (-b - disc) / a);
      hi = std::min(hi, (-b + disc) / a);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw InputError("BestFeasibleSearch: unbounded one-dimensional feasible set");
    }
    const double a = inst.A(0, 0);
    const double b = inst.b(0);
    const double stationary = a != 0.0 ? -b / a : std::numeric_limits<double>::quiet_NaN();
    auto f = [a, b](double x) { return a * x * x + 2.0 * b * x; };
    const auto [x, v] = detail::GridMinimize(f, lo, hi, stationary, budget.grid_points, &est.samples);
    est.best_point = Vector::Constant(1, x);
    est.best_value = v;
    est.method = OracleMethod::kGrid1d;
    est.is_exact = true;
    return est;
  }

  const int n = inst.n();
  est.method = OracleMethod::kMultistart;
  est.best_point = Vector::Zero(n);
  est.best_value = 0.0;  // the origin is feasible
  for (int s = 0; s < budget.starts; ++s) {
    std::mt19937_64 rng = detail::StartRng(seed, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector dir(n);
    for (int i = 0; i < n; ++i) dir(i) = normal(rng);
    // Walk out along dir until the boundary (or a large radius).
    const double reach = 1e3;
    Vector far = (reach / std::max(dir.norm(), 1e-300)) * dir;
    far *= LargestFeasibleScale(inst.ellipsoids, far);
    // Barrier descent needs an interior start.
    Vector x0 = (s % 2 == 0 ? 1.0 - 1e-6 : unif(rng)) * far;
    const double mu_start = std::pow(10.0, -1.0 - (s / 2) % 3);
    Vector x = detail::LocalDescent(inst, x0, budget.iterations, mu_start);
    const double v = Objective(inst, x);
    est.samples += budget.iterations;
    if (Evaluate(inst, x).max_residual <= 1e-9 && v < est.best_value) {
      est.best_value = v;
      est.best_point = x;
    }
  }
  return est;
}

struct PolytopeExtrema {
  double p_lower = 0.0;
  double p_upper = 0.0;
  Vector x_lower;
  Vector x_upper;
  bool is_exact = false;
  std::int64_t samples = 0;
};

namespace detail {

inline double AsqpObjective(const AsqpInstance& a, const Vector& x) {
  return x.dot(a.A.matrix() * x) + 2.0 * a.b.dot(x);
}

inline std::vector<std::vector<int>> AllPermutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Vector PermutationVector(const std::vector<int>& p) {
  const int n = static_cast<int>(p.size());
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i) * n + p[static_cast<std::size_t>(i)]) = 1.0;
  return x;
}

// Frank-Wolfe with exact line search on sign * f; vertices by enumeration.
inline Vector FrankWolfe(const AsqpInstance& a, double sign, Vector x,
                         const std::vector<Vector>& vertices, int iterations) {
  const Matrix& A = a.A.matrix();
  for (int it = 0; it < iterations; ++it) {
    const Vector grad = sign * 2.0 * (A * x + a.b);
    const Vector* best = &vertices.front();
    double best_val = grad.dot(*best);
    for (const auto& v : vertices) {
      const double val = grad.dot(v);
      if (val < best_val) {
        best_val = val;
        best = &v;
      }
    }
    const Vector d = *best - x;
    const double slope = grad.dot(d);
    if (slope >= -1e-13) break;
    const double curv = sign * d.dot(A * d);
    double step = 1.0;
    if (curv > 0.0) step = std::min(1.0, -slope / (2.0 * curv));
    x += step * d;
  }
  return x;
}

// Random interior point of the Birkhoff polytope by Sinkhorn balancing.
inline Vector RandomDoublyStochastic(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = unif(rng);
  for (int it = 0; it < 500; ++it) {
    m = (m.rowwise().sum().cwiseInverse()).asDiagonal() * m;
    m = m * (m.colwise().sum().cwiseInverse()).asDiagonal();
  }
  Vector x(static_cast<Eigen::Index>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(static_cast<Eigen::Index>(i) * n + j) = m(i, j);
  return x;
}

}  // namespace detail

/// Extreme values of an ASQP objective over the Birkhoff polytope. Exact for
/// n = 2 (the polytope is a segment); for 3 <= n <= 6, vertex enumeration
/// plus Frank-Wolfe from vertices and random interior points, which yields
/// inner estimates p_lower >= true min and p_upper <= true max.
inline PolytopeExtrema EstimatePolytopeExtrema(const AsqpInstance& a, std::uint64_t seed,
                                               const OracleBudget& budget = {}) {
  RequireValid(a);
  const int n = a.n;
  PolytopeExtrema out;
  if (n == 2) {
    // x(t) = t I + (1 - t) J with J the swap permutation.
    const Vector p1 = detail::PermutationVector({0, 1});
    const Vector p2 = detail::PermutationVector({1, 0});
    const Vector d = p1 - p2;
    const double qa = d.dot(a.A.matrix() * d);
    const double qb = d.dot(a.A.matrix() * p2) + a.b.dot(d);
    const double stationary = qa != 0.0 ? -qb / qa : std::numeric_limits<double>::quiet_NaN();
    auto f = [&](double t) { return detail::AsqpObjective(a, Vector(p2 + t * d)); };
    auto neg = [&](double t) { return -f(t); };
    const auto [tl, vl] = detail::GridMinimize(f, 0.0, 1.0, stationary, budget.grid_points, &out.samples);
    const auto [tu, vu] = detail::GridMinimize(neg, 0.0, 1.0, stationary, budget.grid_points, &out.samples);
    out.p_lower = vl;
    out.p_upper = -vu;
    out.x_lower = p2 + tl * d;
    out.x_upper = p2 + tu * d;
    out.is_exact = true;
    return out;
  }
  if (n > 6) throw InputError("EstimatePolytopeExtrema: vertex enumeration supports n <= 6");

  std::vector<Vector> vertices;
  for (const auto& p : detail::AllPermutations(n)) vertices.push_back(detail::PermutationVector(p));
  const Vector center = Vector::Constant(static_cast<Eigen::Index>(n) * n, 1.0 / n);

  out.p_lower = std::numeric_limits<double>::infinity();
  out.p_upper = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& x) {
    const double v = detail::AsqpObjective(a, x);
    ++out.samples;
    if (v < out.p_lower) {
      out.p_lower = v;
      out.x_lower = x;
    }
    if (v > out.p_upper) {
      out.p_upper = v;
      out.x_upper = x;
    }
  };
  consider(center);
  for (const auto& v : vertices) consider(v);

  std::vector<Vector> starts = vertices;
  starts.push_back(center);
  for (int s = 0; s < budget.starts; ++s) {
    std::mt19937_64 rng = detail::StartRng(seed, static_cast<std::uint64_t>(s));
    starts.push_back(detail::RandomDoublyStochastic(n, rng));
  }
  for (const auto& x0 : starts) {
    consider(detail::FrankWolfe(a, 1.0, x0, vertices, budget.iterations));
    consider(detail::FrankWolfe(a, -1.0, x0, vertices, budget.iterations));
  }
  return out;
}

}  // namespace ecqp

#endif  // ECQP_ORACLE_HPP_
