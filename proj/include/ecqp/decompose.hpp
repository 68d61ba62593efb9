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

#ifndef ECQP_DECOMPOSE_HPP_
#define ECQP_DECOMPOSE_HPP_

#include <cmath>
#include <sstream>
#include <vector>

#include "ecqp/linalg.hpp"

namespace ecqp {

/// X = sum_i w_i w_i^T with w_i = (u_i, t_i): u_i is the first n entries,
/// t_i the last.
struct RankOneDecomposition {
  std::vector<Vector> vectors;
  int rotations = 0;

  int size() const { return static_cast<int>(vectors.size()); }
  Vector u(int i) const {
    const Vector& w = vectors[static_cast<std::size_t>(i)];
    return w.head(w.size() - 1);
  }
  double t(int i) const {
    const Vector& w = vectors[static_cast<std::size_t>(i)];
    return w(w.size() - 1);
  }
  Matrix Reconstruct() const {
    if (vectors.empty()) return Matrix();
    const Eigen::Index n = vectors.front().size();
    Matrix x = Matrix::Zero(n, n);
    for (const auto& w : vectors) x += w * w.transpose();
    return x;
  }
};

inline constexpr double kDecompositionTol = 1e-8;

/// Scale used by the decomposition tolerances: 1 + ||M||_F ||X||_F.
inline double DecompositionScale(const Matrix& factor, const Matrix& M) {
  return 1.0 + M.norm() * (factor * factor.transpose()).norm();
}

/// Rank-one decomposition of X = P P^T with every w_i^T M w_i <= tol*scale.
/// Each rotation pairs the largest positive form with the most negative
/// remaining one and zeroes the positive one; a zeroed vector is final.
inline RankOneDecomposition DecomposeFactor(const Matrix& factor, const Matrix& M,
                                            double tol = kDecompositionTol) {
  if (M.rows() != factor.rows() || M.cols() != factor.rows()) {
    throw InputError("Decompose: dimension mismatch");
  }
  const Eigen::Index r = factor.cols();
  const double scale = DecompositionScale(factor, M);
  const double bound = tol * scale;

  std::vector<Vector> p;
  std::vector<double> q;
  double total = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    p.push_back(factor.col(i));
    q.push_back(p.back().dot(M * p.back()));
    total += q.back();
  }
  if (total > bound) {
    std::ostringstream os;
    os << "M\xE2\x80\xA2X positive: " << total << " > " << bound;
    throw InputError(os.str());
  }

  RankOneDecomposition out;
  std::vector<bool> done(static_cast<std::size_t>(r), false);
  for (;;) {
    int i = -1;
    for (int k = 0; k < static_cast<int>(r); ++k) {
      if (done[static_cast<std::size_t>(k)] || q[static_cast<std::size_t>(k)] <= bound) continue;
      if (i < 0 || q[static_cast<std::size_t>(k)] > q[static_cast<std::size_t>(i)]) i = k;
    }
    if (i < 0) break;
    int j = -1;
    for (int k = 0; k < static_cast<int>(r); ++k) {
      if (k == i || done[static_cast<std::size_t>(k)] || q[static_cast<std::size_t>(k)] >= 0.0) continue;
      if (j < 0 || q[static_cast<std::size_t>(k)] < q[static_cast<std::size_t>(j)]) j = k;
    }
    if (j < 0) {
      throw NumericalError("Decompose: positive form without a negative partner");
    }
    const auto si = static_cast<std::size_t>(i);
    const auto sj = static_cast<std::size_t>(j);
    // q_j g^2 + 2 c g + q_i = 0; the smaller root avoids cancellation.
    const double qi = q[si];
    const double qj = q[sj];
    const double c = p[si].dot(M * p[sj]);
    const double disc = std::sqrt(c * c - qi * qj);
    const double g = -qi / (c + (c >= 0.0 ? disc : -disc));
    const double norm = std::sqrt(1.0 + g * g);
    const Vector pi = p[si];
    p[si] = (pi + g * p[sj]) / norm;
    p[sj] = (g * pi - p[sj]) / norm;
    q[si] = p[si].dot(M * p[si]);
    q[sj] = p[sj].dot(M * p[sj]);
    done[si] = true;
    ++out.rotations;
  }
  out.vectors = std::move(p);
  return out;
}

inline RankOneDecomposition Decompose(const SymMatrix& X, const SymMatrix& M,
                                      double tol = kDecompositionTol,
                                      double rank_tol = kDefaultRankTol) {
  if (X.dim() != M.dim()) throw InputError("Decompose: dimension mismatch");
  return DecomposeFactor(PsdFactorize(X, rank_tol).columns, M.matrix(), tol);
}

}  // namespace ecqp

#endif  // ECQP_DECOMPOSE_HPP_
