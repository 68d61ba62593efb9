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

// Quadratic programs over the assignment (Birkhoff) polytope.
//
// Writing x = e/n + N y with N spanning the null space of the row- and
// column-sum equalities turns x >= 0, x <= 1 into the n^2 ellipsoid
// constraints (2 N_i y + 2/n - 1)^2 <= 1, each with ||g|| = 1 - 2/n < 1, so
// the ECQP pipeline applies in y.

#ifndef ECQP_ASQP_HPP_
#define ECQP_ASQP_HPP_

#include <cmath>
#include <cstdint>

#include "ecqp/facered.hpp"
#include "ecqp/model.hpp"
#include "ecqp/pipeline.hpp"

namespace ecqp {

/// min x^T A x + 2 b^T x over doubly stochastic n x n matrices, flattened
/// row-major: x_(i,j) is entry i*n + j.
struct AsqpInstance {
  int n = 2;
  SymMatrix A;
  Vector b;
};

inline void RequireValid(const AsqpInstance& a) {
  if (a.n < 2) throw InputError("ASQP: n must be >= 2");
  const Eigen::Index nn = static_cast<Eigen::Index>(a.n) * a.n;
  if (a.A.dim() != nn || a.b.size() != nn) {
    throw InputError("ASQP: A must be n^2 x n^2 and b of length n^2");
  }
  if (!a.A.matrix().allFinite() || !a.b.allFinite()) throw InputError("ASQP: non-finite data");
}

/// Column (k, l), k, l < n-1, is the flattening of
/// e_k e_l^T - e_k e_n^T - e_n e_l^T + e_n e_n^T. Integer entries.
inline Matrix NullspaceBasis(int n) {
  if (n < 2) throw InputError("NullspaceBasis: n must be >= 2");
  const int d = n - 1;
  Matrix N = Matrix::Zero(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(d) * d);
  auto flat = [n](int i, int j) { return static_cast<Eigen::Index>(i) * n + j; };
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const Eigen::Index col = static_cast<Eigen::Index>(k) * d + l;
      N(flat(k, l), col) += 1.0;
      N(flat(k, n - 1), col) -= 1.0;
      N(flat(n - 1, l), col) -= 1.0;
      N(flat(n - 1, n - 1), col) += 1.0;
    }
  }
  return N;
}

struct AsqpReduction {
  EcqpInstance ecqp;  // in y; offset = h(0)
  Matrix N;
  double h0 = 0.0;    // f(e/n)
};

inline AsqpReduction ToEcqp(const AsqpInstance& a) {
  RequireValid(a);
  const int n = a.n;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  AsqpReduction red;
  red.N = NullspaceBasis(n);
  const Matrix& N = red.N;
  const Vector center = Vector::Constant(nn, 1.0 / n);
  red.ecqp.A = SymMatrix::Symmetrized(N.transpose() * a.A.matrix() * N);
  red.ecqp.b = N.transpose() * (a.A.matrix() * center + a.b);
  red.h0 = center.dot(a.A.matrix() * center) + 2.0 * a.b.dot(center);
  red.ecqp.offset = red.h0;
  const double g = 2.0 / n - 1.0;
  for (Eigen::Index k = 0; k < nn; ++k) {
    Ellipsoid e;
    e.F = 2.0 * N.row(k);
    e.g = Vector::Constant(1, g);
    red.ecqp.ellipsoids.push_back(std::move(e));
  }
  return red;
}

/// 4 / (n^2 (sqrt(r0(n^2)) + 1 - 2/n)^2).
inline double GFunction(int n) {
  if (n < 2) throw InputError("GFunction: n must be >= 2");
  const double nd = n;
  const double r0 = static_cast<double>(RankBound(static_cast<std::int64_t>(n) * n));
  const double den = std::sqrt(r0) + 1.0 - 2.0 / nd;
  return 4.0 / (nd * nd * den * den);
}

/// 1 - 1/(n^2 (2n-2)) + 1/(n^3 (2n-2)).
inline double FuBound(int n) {
  if (n < 2) throw InputError("FuBound: n must be >= 2");
  const double nd = n;
  return 1.0 - 1.0 / (nd * nd * (2.0 * nd - 2.0)) + 1.0 / (nd * nd * nd * (2.0 * nd - 2.0));
}

struct AsqpQuality {
  double epsilon = 0.0;
  double g_n = 0.0;
  double fu_bound = 0.0;
  bool within_guarantee = false;  // epsilon <= 1 - g(n) + tol
  bool g_exceeds_inverse_cube = false;
  bool improves_fu = false;       // 1 - g(n) < fu_bound
};

inline AsqpQuality QualityMetrics(double f_x, double p_lower, double p_upper, int n,
                                  double tol = 1e-6) {
  AsqpQuality q;
  q.epsilon = p_upper > p_lower ? (f_x - p_lower) / (p_upper - p_lower) : 0.0;
  q.g_n = GFunction(n);
  q.fu_bound = FuBound(n);
  const double nd = n;
  q.within_guarantee = q.epsilon <= 1.0 - q.g_n + tol;
  q.g_exceeds_inverse_cube = q.g_n > 1.0 / (nd * nd * nd);
  q.improves_fu = 1.0 - q.g_n < q.fu_bound;
  return q;
}

struct AsqpResult {
  int n = 2;
  Vector y;
  Vector x_flat;
  Matrix x;                  // n x n
  double f_x = 0.0;          // f(x) = h(y)
  double h0 = 0.0;
  double v_sdp_shifted = 0.0;  // SDP value of h(y) - h(0)
  double g_n = 0.0;
  double fu_bound = 0.0;
  double guarantee_rhs = 0.0;  // h0 + g(n) * v_sdp_shifted
  bool guarantee_holds = false;
  double max_sum_error = 0.0;  // max |row or column sum - 1|
  double min_entry = 0.0;
  double max_entry = 0.0;
  PipelineResult pipeline;
};

inline AsqpResult SolveAsqp(const AsqpInstance& a, const PipelineOptions& opts = {}) {
  const AsqpReduction red = ToEcqp(a);
  AsqpResult out;
  out.n = a.n;
  out.pipeline = RunPipeline(red.ecqp, opts);
  const RoundingCertificate& cert = out.pipeline.certificate;
  out.y = cert.x;
  const Eigen::Index nn = static_cast<Eigen::Index>(a.n) * a.n;
  out.x_flat = Vector::Constant(nn, 1.0 / a.n) + red.N * out.y;
  out.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.x_flat.data(), a.n, a.n);
  out.f_x = out.x_flat.dot(a.A.matrix() * out.x_flat) + 2.0 * a.b.dot(out.x_flat);
  out.h0 = red.h0;
  out.v_sdp_shifted = cert.v_sdp;
  out.g_n = GFunction(a.n);
  out.fu_bound = FuBound(a.n);
  out.guarantee_rhs = out.h0 + out.g_n * out.v_sdp_shifted;
  out.guarantee_holds = out.f_x <= out.guarantee_rhs + cert.cert_tol;
  out.max_sum_error = std::max((out.x.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                               (out.x.colwise().sum().array() - 1.0).abs().maxCoeff());
  out.min_entry = out.x.minCoeff();
  out.max_entry = out.x.maxCoeff();
  return out;
}

}  // namespace ecqp

#endif  // ECQP_ASQP_HPP_
