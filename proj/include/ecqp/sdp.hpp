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

// Semidefinite relaxation of a homogenized ECQP and a dense primal-dual
// interior-point solver for it.
//
// Primal:  min B . X   s.t.  B^k . X + s_k = 0 (k < m),  E . X = 1,
//                            X psd, s >= 0,
// Dual:    max y_E     s.t.  Z = B - sum_k y_k B^k - y_E E psd,
//                            z_k = -y_k >= 0.
//
// Search directions use Nesterov-Todd scaling on the PSD block and the
// usual s_k z_k complementarity on the slack orthant, with a Mehrotra
// predictor-corrector step.

#ifndef ECQP_SDP_HPP_
#define ECQP_SDP_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ecqp/linalg.hpp"
#include "ecqp/model.hpp"

namespace ecqp {

struct ConicProgram {
  SymMatrix objective;                 // B
  std::vector<SymMatrix> inequalities; // B^k . X <= 0, one slack each
  SymMatrix equality;                  // E = e_{n+1} e_{n+1}^T
  double equality_rhs = 1.0;

  Eigen::Index dim() const { return objective.dim(); }
  int num_inequalities() const { return static_cast<int>(inequalities.size()); }
  int num_constraints() const { return num_inequalities() + 1; }

  /// Constraint matrix i: inequalities first, then the equality.
  const SymMatrix& constraint(int i) const {
    return i < num_inequalities() ? inequalities[static_cast<std::size_t>(i)] : equality;
  }
};

inline ConicProgram BuildRelaxation(const HomogenizedProblem& h) {
  ConicProgram p;
  p.objective = h.B;
  p.inequalities = h.Bk;
  const Eigen::Index N = h.B.dim();
  p.equality = SymMatrix(N);
  p.equality.set(N - 1, N - 1, 1.0);
  for (const auto& bk : h.Bk) {
    if (bk.dim() != N) throw InputError("BuildRelaxation: constraint dimension mismatch");
  }
  return p;
}

enum class SdpStatus { kOptimal, kMaxIter, kNumericalFailure };

inline std::string ToString(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kMaxIter: return "max_iter";
    case SdpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

inline SdpStatus SdpStatusFromString(const std::string& s) {
  if (s == "optimal") return SdpStatus::kOptimal;
  if (s == "max_iter") return SdpStatus::kMaxIter;
  if (s == "numerical_failure") return SdpStatus::kNumericalFailure;
  throw InputError("unknown SDP status '" + s + "'");
}

struct SdpOptions {
  double gap_tol = 1e-8;     // relative duality gap
  double feas_tol = 1e-8;    // relative primal and dual residuals
  int max_iter = 200;
  double step_fraction = 0.98;
  // Iterations continue past gap_tol/feas_tol until every measure is below
  // polish_factor times its tolerance, the iteration stalls or breaks down;
  // the best iterate seen is returned.
  double polish_factor = 1e-2;
  double rank_tol = kDefaultRankTol;
};

struct SdpSolution {
  SymMatrix X;
  Vector slacks;        // s_k = -B^k . X
  Vector y;             // m inequality multipliers, then the equality one
  SymMatrix Z;          // dual slack matrix
  double v_sdp = 0.0;   // B . X
  double dual_objective = 0.0;
  double gap = 0.0;     // |primal - dual| / (1 + |primal| + |dual|)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;  // X . Z + s . z
  SdpStatus status = SdpStatus::kNumericalFailure;
  int rank = 0;
  int iterations = 0;
  // Optional PSD factor with X = factor factor^T. Filled by rank reduction;
  // empty when only X is known.
  Matrix factor;
};

namespace detail {

struct IpmIterate {
  Matrix X, Z;
  Vector s, z, y;
};

struct IpmDirection {
  Matrix dX, dZ;
  Vector ds, dz, dy;
};

// Largest alpha with M + alpha dM psd, given M = L L^T.
inline double MaxPsdStep(const Eigen::LLT<Matrix>& chol, const Matrix& dM) {
  const auto L = chol.matrixL();
  Matrix t = L.solve(dM);
  t = L.solve(t.transpose()).transpose();
  const double lmin = SymEig(t).eigenvalues(t.rows() - 1);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double MaxOrthantStep(const Vector& v, const Vector& dv) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

}  // namespace detail

inline SdpSolution SolveSdp(const ConicProgram& p, const SdpOptions& opts = {}) {
  const Eigen::Index N = p.dim();
  const int m = p.num_inequalities();
  const int ncon = p.num_constraints();
  const Matrix& C = p.objective.matrix();

  std::vector<Matrix> A;
  A.reserve(static_cast<std::size_t>(ncon));
  for (int i = 0; i < ncon; ++i) A.push_back(p.constraint(i).matrix());
  Vector rhs_b = Vector::Zero(ncon);
  rhs_b(m) = p.equality_rhs;

  double rho = 1.0 + C.norm();
  for (const auto& a : A) rho = std::max(rho, 1.0 + a.norm());

  detail::IpmIterate it;
  it.X = rho * Matrix::Identity(N, N);
  it.Z = rho * Matrix::Identity(N, N);
  it.s = Vector::Constant(m, rho);
  it.z = Vector::Constant(m, rho);
  it.y = Vector::Zero(ncon);

  const double b_scale = 1.0 + rhs_b.norm();
  const double c_scale = 1.0 + C.norm();
  const double cone_dim = static_cast<double>(N + m);

  SdpSolution out;

  auto finalize = [&](const detail::IpmIterate& w, SdpStatus status, int iters) {
    out.X = SymMatrix::Symmetrized(w.X);
    out.Z = SymMatrix::Symmetrized(w.Z);
    out.y = w.y;
    out.slacks.resize(m);
    for (int k = 0; k < m; ++k) out.slacks(k) = -Inner(A[static_cast<std::size_t>(k)], out.X.matrix());
    out.v_sdp = Inner(C, out.X.matrix());
    out.dual_objective = rhs_b.dot(w.y);
    out.gap = std::abs(out.v_sdp - out.dual_objective) /
              (1.0 + std::abs(out.v_sdp) + std::abs(out.dual_objective));
    out.complementarity = Inner(w.X, w.Z) + w.s.dot(w.z);
    out.status = status;
    out.iterations = iters;
    try {
      out.rank = PsdFactorize(out.X, opts.rank_tol).rank;
    } catch (const Error&) {
      out.rank = static_cast<int>(N);
      out.status = SdpStatus::kNumericalFailure;
    }
  };

  detail::IpmIterate best = it;
  int best_iter = 0;
  double best_merit = std::numeric_limits<double>::infinity();
  auto merit_of = [&](double gap, double pinf, double dinf) {
    return std::max({gap / opts.gap_tol, pinf / opts.feas_tol, dinf / opts.feas_tol});
  };
  auto finish_best = [&](SdpStatus fallback) {
    const bool converged = best_merit <= 1.0;
    finalize(best, converged ? SdpStatus::kOptimal : fallback, best_iter);
    return out;
  };
  int stalled = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    // Residuals.
    Vector rp(ncon);
    for (int i = 0; i < ncon; ++i) {
      rp(i) = rhs_b(i) - Inner(A[static_cast<std::size_t>(i)], it.X) - (i < m ? it.s(i) : 0.0);
    }
    Matrix Rd = C - it.Z;
    for (int i = 0; i < ncon; ++i) Rd -= it.y(i) * A[static_cast<std::size_t>(i)];
    Vector rds(m);
    for (int k = 0; k < m; ++k) rds(k) = -it.y(k) - it.z(k);

    const double pobj = Inner(C, it.X);
    const double dobj = rhs_b.dot(it.y);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / b_scale;
    const double dinf = (Rd.norm() + rds.norm()) / c_scale;
    const double mu = (Inner(it.X, it.Z) + it.s.dot(it.z)) / cone_dim;

    const double merit = merit_of(gap, pinf, dinf);
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_iter = iter;
      out.primal_residual = pinf;
      out.dual_residual = dinf;
    }
    if (merit <= opts.polish_factor || stalled >= 3) return finish_best(SdpStatus::kMaxIter);
    if (iter == opts.max_iter) break;

    // Nesterov-Todd scaling: X = L L^T, L^T Z L = U diag(lam) U^T,
    // G = L U diag(lam)^{-1/4}, W = G G^T, so that W Z W = X and the scaled
    // point G^{-1} X G^{-T} = G^T Z G = diag(sqrt(lam)).
    Eigen::LLT<Matrix> cholX(it.X);
    Eigen::LLT<Matrix> cholZ(it.Z);
    if (cholX.info() != Eigen::Success || cholZ.info() != Eigen::Success) {
      return finish_best(SdpStatus::kNumericalFailure);
    }
    const Matrix L = cholX.matrixL();
    const SpectralFactorization tz = SymEig(Matrix(L.transpose() * it.Z * L));
    const Vector lam = tz.eigenvalues;
    if (lam.minCoeff() <= 0.0) {
      return finish_best(SdpStatus::kNumericalFailure);
    }
    const Vector d = lam.cwiseSqrt();
    const Vector quarter = lam.array().pow(-0.25).matrix();
    const Matrix G = L * tz.eigenvectors * quarter.asDiagonal();
    const Matrix Ginv = (lam.array().pow(0.25).matrix()).asDiagonal() *
                        tz.eigenvectors.transpose() * L.triangularView<Eigen::Lower>().solve(
                                                          Matrix::Identity(N, N));
    const Matrix W = G * G.transpose();

    std::vector<Matrix> WAW(static_cast<std::size_t>(ncon));
    for (int j = 0; j < ncon; ++j) {
      WAW[static_cast<std::size_t>(j)] = W * A[static_cast<std::size_t>(j)] * W;
    }
    Matrix M(ncon, ncon);
    for (int i = 0; i < ncon; ++i) {
      for (int j = i; j < ncon; ++j) {
        const double v = Inner(A[static_cast<std::size_t>(i)], WAW[static_cast<std::size_t>(j)]);
        M(i, j) = v;
        M(j, i) = v;
      }
    }
    for (int k = 0; k < m; ++k) M(k, k) += it.s(k) / it.z(k);
    Eigen::LDLT<Matrix> schur(M);
    if (schur.info() != Eigen::Success) {
      return finish_best(SdpStatus::kNumericalFailure);
    }

    // rhs_c is the right-hand side of D R + R D = rhs_c in scaled space;
    // rc is the orthant complementarity right-hand side.
    auto solve_direction = [&](const Matrix& rhs_c, const Vector& rc) {
      detail::IpmDirection dir;
      Matrix R(N, N);
      for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < N; ++i) R(i, j) = rhs_c(i, j) / (d(i) + d(j));
      const Matrix GRG = G * R * G.transpose();
      Vector r(ncon);
      for (int i = 0; i < ncon; ++i) {
        r(i) = rp(i) - Inner(A[static_cast<std::size_t>(i)], GRG) +
               Inner(WAW[static_cast<std::size_t>(i)], Rd);
      }
      for (int k = 0; k < m; ++k) r(k) -= (rc(k) - it.s(k) * rds(k)) / it.z(k);
      dir.dy = schur.solve(r);
      dir.dZ = Rd;
      for (int i = 0; i < ncon; ++i) dir.dZ -= dir.dy(i) * A[static_cast<std::size_t>(i)];
      dir.dZ = 0.5 * (dir.dZ + dir.dZ.transpose()).eval();
      dir.dX = GRG - W * dir.dZ * W;
      dir.dX = 0.5 * (dir.dX + dir.dX.transpose()).eval();
      dir.dz.resize(m);
      dir.ds.resize(m);
      for (int k = 0; k < m; ++k) {
        dir.dz(k) = rds(k) - dir.dy(k);
        dir.ds(k) = (rc(k) - it.s(k) * dir.dz(k)) / it.z(k);
      }
      return dir;
    };

    auto step_lengths = [&](const detail::IpmDirection& dir, double fraction) {
      double ap = std::min(detail::MaxPsdStep(cholX, dir.dX), detail::MaxOrthantStep(it.s, dir.ds));
      double ad = std::min(detail::MaxPsdStep(cholZ, dir.dZ), detail::MaxOrthantStep(it.z, dir.dz));
      return std::pair<double, double>{std::min(1.0, fraction * ap), std::min(1.0, fraction * ad)};
    };

    // Predictor.
    const Matrix D2 = Matrix(d.cwiseProduct(d).asDiagonal());
    const detail::IpmDirection aff = solve_direction(-2.0 * D2, Vector(-it.s.cwiseProduct(it.z)));
    const auto [ap_aff, ad_aff] = step_lengths(aff, 1.0);
    const double mu_aff = (Inner(it.X + ap_aff * aff.dX, it.Z + ad_aff * aff.dZ) +
                           (it.s + ap_aff * aff.ds).dot(it.z + ad_aff * aff.dz)) /
                          cone_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector with the second-order term in scaled space.
    const Matrix dXs = Ginv * aff.dX * Ginv.transpose();
    const Matrix dZs = G.transpose() * aff.dZ * G;
    const Matrix corr = dXs * dZs + dZs * dXs;
    Matrix rhs_c = 2.0 * (sigma * mu * Matrix::Identity(N, N) - D2) - corr;
    rhs_c = 0.5 * (rhs_c + rhs_c.transpose()).eval();
    Vector rc = Vector::Constant(m, sigma * mu) - it.s.cwiseProduct(it.z) - aff.ds.cwiseProduct(aff.dz);
    const detail::IpmDirection dir = solve_direction(rhs_c, rc);
    const auto [ap, ad] = step_lengths(dir, opts.step_fraction);

    it.X += ap * dir.dX;
    it.X = 0.5 * (it.X + it.X.transpose()).eval();
    it.s += ap * dir.ds;
    it.Z += ad * dir.dZ;
    it.Z = 0.5 * (it.Z + it.Z.transpose()).eval();
    it.z += ad * dir.dz;
    it.y += ad * dir.dy;
    stalled = std::max(ap, ad) < 1e-8 ? stalled + 1 : 0;
  }

  return finish_best(SdpStatus::kMaxIter);
}

inline SdpSolution SolveRelaxation(const EcqpInstance& inst, const SdpOptions& opts = {}) {
  RequireValid(inst);
  return SolveSdp(BuildRelaxation(Homogenize(inst)), opts);
}

/// Rebuilds an SdpSolution from X alone (imported results); duals are left
/// empty and the status is taken from the caller.
inline SdpSolution SolutionFromPrimal(const ConicProgram& p, const SymMatrix& X, SdpStatus status,
                                      double gap, double rank_tol = kDefaultRankTol) {
  if (X.dim() != p.dim()) throw InputError("solution X has the wrong dimension");
  SdpSolution sol;
  sol.X = X;
  sol.Z = SymMatrix(p.dim());
  sol.y = Vector::Zero(p.num_constraints());
  sol.slacks.resize(p.num_inequalities());
  for (int k = 0; k < p.num_inequalities(); ++k) {
    sol.slacks(k) = -Inner(p.inequalities[static_cast<std::size_t>(k)], X);
  }
  sol.v_sdp = Inner(p.objective, X);
  sol.dual_objective = sol.v_sdp;
  sol.gap = gap;
  sol.status = status;
  sol.rank = PsdFactorize(X, rank_tol).rank;
  double pres = std::abs(Inner(p.equality, X) - p.equality_rhs);
  for (int k = 0; k < p.num_inequalities(); ++k) pres = std::max(pres, -sol.slacks(k));
  sol.primal_residual = std::max(0.0, pres);
  return sol;
}

}  // namespace ecqp

#endif  // ECQP_SDP_HPP_
