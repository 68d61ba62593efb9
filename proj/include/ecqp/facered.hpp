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

// Rank reduction along the optimal face of the relaxation.
//
// With X = V V^T of rank r and more than m + 1 free parameters in S^r, some
// nonzero symmetric D satisfies <V^T A_i V, D> = 0 for every constraint
// matrix A_i. Moving X along V (I + t D) V^T keeps every constraint value
// fixed; choosing t = -1/lambda for the eigenvalue of D with largest
// magnitude makes I + t D singular and drops the rank.

#ifndef ECQP_FACERED_HPP_
#define ECQP_FACERED_HPP_

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "ecqp/linalg.hpp"
#include "ecqp/sdp.hpp"

namespace ecqp {

/// Smallest r >= 1 with m + 1 <= (r + 2)(r + 1)/2 - 1, i.e. the ceiling of
/// (sqrt(8m + 17) - 3)/2, computed in integers.
constexpr std::int64_t RankBound(std::int64_t m) {
  if (m < 1) throw InputError("RankBound: m must be >= 1");
  // (r + 1)(r + 2) >= 2m + 4.
  const std::int64_t target = 2 * m + 4;
  std::int64_t r = 1;
  // Integer square root of target as a starting guess.
  std::int64_t lo = 0, hi = 1;
  while (hi * hi <= target) hi *= 2;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (mid * mid <= target) lo = mid; else hi = mid;
  }
  r = lo > 3 ? lo - 3 : 1;
  while ((r + 1) * (r + 2) < target) ++r;
  while (r > 1 && r * (r + 1) >= target) --r;
  return r;
}

struct RankBudget {
  int m = 1;
  int r0 = 1;

  static RankBudget For(int m) { return {m, static_cast<int>(RankBound(m))}; }
};

struct FaceReductionOptions {
  // Eigenvalues below this fraction of (1 + lambda_max) are treated as zero
  // when the initial factor is formed; the face moves themselves are exact.
  double initial_rank_tol = 1e-14;
  double objective_slope_tol = 1e-6;
  double column_drop_tol = 1e-12;
};

struct FaceReductionTrace {
  int initial_rank = 0;
  int iterations = 0;
  int objective_resolves = 0;  // times the objective joined the system
};

/// Reduces sol.X to rank <= RankBound(m) without changing any constraint
/// value. The returned solution carries the factor in `factor`.
inline SdpSolution ReduceRank(const SdpSolution& sol, const ConicProgram& p,
                              const FaceReductionOptions& opts = {},
                              FaceReductionTrace* trace = nullptr) {
  const int r0 = static_cast<int>(RankBound(p.num_inequalities()));
  Matrix V = sol.factor.size() > 0 ? sol.factor
                                   : PsdFactorize(sol.X, opts.initial_rank_tol).columns;
  if (V.rows() != p.dim()) throw InputError("ReduceRank: factor has the wrong dimension");
  FaceReductionTrace local;
  local.initial_rank = static_cast<int>(V.cols());

  SdpSolution out = sol;
  if (V.cols() <= r0) {
    out.factor = V;
    out.rank = static_cast<int>(V.cols());
    if (trace) *trace = local;
    return out;
  }

  const double v_scale = 1.0 + std::abs(sol.v_sdp);
  const Matrix& C = p.objective.matrix();

  while (V.cols() > r0) {
    const Eigen::Index r = V.cols();
    std::vector<Matrix> system;
    system.reserve(static_cast<std::size_t>(p.num_constraints()) + 1);
    for (int i = 0; i < p.num_constraints(); ++i) {
      system.push_back(V.transpose() * p.constraint(i).matrix() * V);
    }
    std::vector<SymMatrix> basis = SymNullspace(system, r);
    if (basis.empty()) {
      std::ostringstream os;
      os << "ReduceRank: no face direction at rank " << r << " > r0 = " << r0
         << " with " << p.num_constraints()
         << " constraints; the numerical rank is likely overestimated";
      throw NumericalError(os.str());
    }
    const Matrix VCV = V.transpose() * C * V;
    Matrix D = basis.front().matrix();
    bool sign_restricted = false;
    if (std::abs(Inner(VCV, D)) > opts.objective_slope_tol * v_scale) {
      ++local.objective_resolves;
      system.push_back(VCV);
      std::vector<SymMatrix> with_obj = SymNullspace(system, r);
      if (!with_obj.empty()) {
        D = with_obj.front().matrix();
      } else {
        // Only the direction that does not increase the objective is used.
        sign_restricted = true;
        if (Inner(VCV, D) > 0.0) D = -D;
      }
    }

    const SpectralFactorization eig = SymEig(D);
    const double spectral = std::max(std::abs(eig.eigenvalues(0)),
                                     std::abs(eig.eigenvalues(r - 1)));
    const Vector mu = eig.eigenvalues / spectral;
    double lambda;
    if (sign_restricted) {
      // t > 0 moves along +D, so the blocking eigenvalue is the most negative.
      if (mu(r - 1) >= 0.0) {
        throw NumericalError("ReduceRank: descent direction never leaves the cone");
      }
      lambda = mu(r - 1);
    } else {
      lambda = std::abs(mu(0)) >= std::abs(mu(r - 1)) ? mu(0) : mu(r - 1);
    }
    const double t = -1.0 / lambda;

    std::vector<Eigen::Index> keep;
    Vector scale(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      scale(j) = std::max(0.0, 1.0 + t * mu(j));
      if (scale(j) > opts.column_drop_tol) keep.push_back(j);
    }
    const Matrix rotated = V * eig.eigenvectors;
    Matrix next(V.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      next.col(static_cast<Eigen::Index>(c)) = std::sqrt(scale(keep[c])) * rotated.col(keep[c]);
    }
    if (next.cols() >= r) throw NumericalError("ReduceRank: face step did not reduce rank");
    V = std::move(next);
    ++local.iterations;
  }

  out.factor = V;
  out.rank = static_cast<int>(V.cols());
  out.X = SymMatrix::Symmetrized(V * V.transpose());
  out.v_sdp = Inner(p.objective, out.X);
  out.slacks.resize(p.num_inequalities());
  for (int k = 0; k < p.num_inequalities(); ++k) {
    out.slacks(k) = -Inner(p.inequalities[static_cast<std::size_t>(k)], out.X);
  }
  if (out.y.size() == p.num_constraints()) {
    out.complementarity =
        Inner(out.X, out.Z) - out.slacks.dot(out.y.head(p.num_inequalities()));
  }
  if (trace) *trace = local;
  return out;
}

}  // namespace ecqp

#endif  // ECQP_FACERED_HPP_
