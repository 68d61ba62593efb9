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

// Deterministic rounding of a low-rank relaxation optimum.
//
// B* is B with its corner replaced by -v(SDP), so B* . X* = 0. Decomposing
// X* = sum w_i w_i^T with w_i^T B* w_i <= 0 gives, for every w_i = (u_i, t_i)
// with t_i != 0, a point u_i / t_i whose objective is at most v(SDP). The
// vector minimizing max_k ||F^k u_i/t_i + g^k||^2 lies within sqrt(rank) of
// every ellipsoid centre; flipping its sign so that b^T x <= 0 and scaling it
// back into the feasible set gives
//
//   f(x) <= (1 - gamma)^2 / (sqrt(r~) + gamma)^2 * v(SDP).

#ifndef ECQP_ROUNDING_HPP_
#define ECQP_ROUNDING_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ecqp/decompose.hpp"
#include "ecqp/facered.hpp"
#include "ecqp/model.hpp"
#include "ecqp/sdp.hpp"

namespace ecqp {

struct RoundingCertificate {
  Vector x;
  Vector x_bar;
  double tau_bar = 1.0;
  double tau_lower_bound = 0.0;  // (1 - gamma)/(sqrt(r_used) + gamma)
  double gamma = 0.0;
  int m = 0;
  int n = 0;
  int r0 = 1;
  int r_used = 0;
  int r_tilde = 1;
  double ratio = 1.0;
  double v_sdp = 0.0;
  double v_bstar = 0.0;         // B . X / X_{n+1,n+1}, the corner of B*
  double f_x = 0.0;
  double bound = 0.0;           // ratio * v_sdp
  double cert_tol = 0.0;
  Vector residuals;
  double max_residual = 0.0;
  int selected_index = -1;      // -1 when the origin is returned
  double selected_value = 0.0;  // max_k ||F^k u/t + g^k||^2 at the selected index
  bool trivial = false;         // v_sdp >= -cert_tol, x = 0

  bool holds(double feas_tol = kFeasibilityTol) const {
    return f_x <= bound + cert_tol && max_residual <= feas_tol;
  }
};

class CertificateViolation : public Error {
 public:
  CertificateViolation(const std::string& what, RoundingCertificate cert)
      : Error(ErrorKind::kInvariant, what), cert_(std::move(cert)) {}
  const RoundingCertificate& certificate() const { return cert_; }

 private:
  RoundingCertificate cert_;
};

struct RoundingOptions {
  double cert_abs_tol = 1e-6;
  double cert_rel_tol = 1e-6;
  double feas_tol = kFeasibilityTol;
  // Tighter than the decomposition default: a residual positive form on a
  // vector with small t_i is amplified by 1/t_i^2 in the candidate objective.
  double decomposition_tol = 1e-13;
  double selection_tol = 1e-6;   // on sqrt of the selected value
  double rank_tol = kDefaultRankTol;
};

/// (1 - gamma)^2 / (sqrt(r) + gamma)^2.
inline double ApproximationRatio(double gamma, double r) {
  return (1.0 - gamma) * (1.0 - gamma) / ((std::sqrt(r) + gamma) * (std::sqrt(r) + gamma));
}

inline SymMatrix BuildBStar(const HomogenizedProblem& h, double v_sdp) {
  Matrix b = h.B.matrix();
  const Eigen::Index N = b.rows();
  b(N - 1, N - 1) = -v_sdp;
  return SymMatrix::FromMatrix(b);
}

struct CandidateSelection {
  int index = -1;
  double value = std::numeric_limits<double>::infinity();
};

/// argmin_i max_k ||F^k u_i + t_i g^k||^2 / t_i^2, with 1/0 = +inf.
inline CandidateSelection SelectCandidate(const RankOneDecomposition& d,
                                          const std::vector<Ellipsoid>& ellipsoids,
                                          double t_floor = 1e-12) {
  CandidateSelection best;
  for (int i = 0; i < d.size(); ++i) {
    const double t = d.t(i);
    if (std::abs(t) < t_floor) continue;
    const Vector u = d.u(i);
    double worst = 0.0;
    for (const auto& e : ellipsoids) {
      worst = std::max(worst, (e.F * u + t * e.g).squaredNorm() / (t * t));
    }
    if (best.index < 0 || worst < best.value) {
      best.index = i;
      best.value = worst;
    }
  }
  if (best.index < 0) {
    throw InvariantError("SelectCandidate: every t_i vanishes, but sum t_i^2 should be 1");
  }
  return best;
}

/// max{tau in [0, 1] : ||tau F^k x + g^k||^2 <= 1 for all k}.
inline double ComputeTau(const Vector& x_bar, const std::vector<Ellipsoid>& ellipsoids) {
  return LargestFeasibleScale(ellipsoids, x_bar);
}

/// Rounds a relaxation optimum of rank <= r0 (see ReduceRank) into a
/// feasible point and checks the approximation certificate. Throws
/// CertificateViolation if the certificate does not hold.
/// `decomposition`, when given, receives the rank-one vectors (empty for a
/// trivial certificate).
inline RoundingCertificate RoundSolution(const EcqpInstance& inst, const SdpSolution& sol,
                                         const RoundingOptions& opts = {},
                                         RankOneDecomposition* decomposition = nullptr) {
  RequireValid(inst);
  const HomogenizedProblem h = Homogenize(inst);
  RoundingCertificate cert;
  cert.n = inst.n();
  cert.m = inst.m();
  cert.gamma = Gamma(inst);
  cert.r0 = static_cast<int>(RankBound(cert.m));
  cert.r_tilde = std::min(cert.r0, cert.n + 1);
  cert.ratio = ApproximationRatio(cert.gamma, cert.r_tilde);
  cert.v_sdp = sol.v_sdp;
  cert.bound = cert.ratio * cert.v_sdp;
  cert.cert_tol = opts.cert_abs_tol + opts.cert_rel_tol * std::abs(cert.v_sdp);

  Matrix factor = sol.factor.size() > 0 ? sol.factor
                                        : PsdFactorize(sol.X, opts.rank_tol).columns;
  // Rescale so that X_{n+1,n+1} = sum t_i^2 = 1 holds exactly; B* then
  // annihilates X up to rounding.
  const double corner = factor.size() > 0 ? factor.row(factor.rows() - 1).squaredNorm() : 0.0;
  if (corner > 0.0) factor /= std::sqrt(corner);
  cert.v_bstar = corner > 0.0 ? Inner(h.B.matrix(), Matrix(factor * factor.transpose())) : 0.0;
  cert.r_used = static_cast<int>(factor.cols());
  cert.tau_lower_bound =
      cert.r_used > 0 ? (1.0 - cert.gamma) / (std::sqrt(static_cast<double>(cert.r_used)) + cert.gamma)
                      : 1.0;

  auto finish = [&](const Vector& x) {
    cert.x = x;
    const Evaluation ev = Evaluate(inst, x);
    cert.f_x = ev.objective;
    cert.residuals = ev.residuals;
    cert.max_residual = ev.max_residual;
  };

  if (cert.v_sdp >= -cert.cert_tol) {
    cert.trivial = true;
    cert.x_bar = Vector::Zero(cert.n);
    cert.tau_bar = 1.0;
    finish(cert.x_bar);
  } else {
    const SymMatrix bstar = BuildBStar(h, cert.v_bstar);
    const RankOneDecomposition d =
        DecomposeFactor(factor, bstar.matrix(), opts.decomposition_tol);
    if (decomposition) *decomposition = d;
    const CandidateSelection sel = SelectCandidate(d, inst.ellipsoids);
    cert.selected_index = sel.index;
    cert.selected_value = sel.value;
    Vector x_bar = d.u(sel.index) / d.t(sel.index);
    if (inst.b.dot(x_bar) > 0.0) x_bar = -x_bar;
    cert.x_bar = x_bar;
    cert.tau_bar = ComputeTau(x_bar, inst.ellipsoids);
    finish(cert.tau_bar * x_bar);
  }

  std::ostringstream why;
  if (!(cert.f_x <= cert.bound + cert.cert_tol)) {
    why << "f(x) = " << cert.f_x << " exceeds ratio * v_sdp = " << cert.bound << "; ";
  }
  if (!(cert.max_residual <= opts.feas_tol)) {
    why << "infeasible point, residual " << cert.max_residual << "; ";
  }
  if (!cert.trivial) {
    const double tau_floor = (1.0 - cert.gamma) /
                             (std::sqrt(static_cast<double>(cert.r_used)) + opts.selection_tol +
                              cert.gamma);
    if (!(cert.tau_bar >= tau_floor)) {
      why << "tau_bar " << cert.tau_bar << " below the guaranteed " << cert.tau_lower_bound << "; ";
    }
    if (!(std::sqrt(cert.selected_value) <=
          std::sqrt(static_cast<double>(cert.r_used)) + opts.selection_tol)) {
      why << "selected candidate value " << cert.selected_value << " exceeds rank "
          << cert.r_used << "; ";
    }
  }
  if (!why.str().empty()) throw CertificateViolation("certificate violated: " + why.str(), cert);
  return cert;
}

}  // namespace ecqp

#endif  // ECQP_ROUNDING_HPP_
