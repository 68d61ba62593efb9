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

// Dense symmetric linear algebra: the SymMatrix value type, a cyclic Jacobi
// eigensolver, PSD factorization and null spaces of trace-inner-product
// constraint systems over S^r.

#ifndef ECQP_LINALG_HPP_
#define ECQP_LINALG_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ecqp/error.hpp"

namespace ecqp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real symmetric matrix. Entries (i,j) and (j,i) are bitwise equal.
class SymMatrix {
 public:
  SymMatrix() : data_(Matrix::Zero(1, 1)) {}
  explicit SymMatrix(Eigen::Index dim) : data_(Matrix::Zero(dim, dim)) {
    if (dim < 1) throw InputError("SymMatrix: dimension must be >= 1");
  }

  /// Takes the average of m and its transpose after checking that the
  /// asymmetry is at most `tol` (absolute, entrywise).
  static SymMatrix FromMatrix(const Matrix& m, double tol = 0.0) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw InputError("SymMatrix: matrix must be square and non-empty");
    }
    if (!m.allFinite()) throw InputError("SymMatrix: non-finite entry");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol) {
      std::ostringstream os;
      os << "SymMatrix: asymmetry " << asym << " exceeds " << tol;
      throw InputError(os.str());
    }
    SymMatrix s;
    s.data_ = m;
    s.Symmetrize();
    return s;
  }

  /// Symmetrizes unconditionally. Use for matrices that are symmetric up to
  /// rounding by construction (products like V V^T).
  static SymMatrix Symmetrized(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw InputError("SymMatrix: matrix must be square and non-empty");
    }
    SymMatrix s;
    s.data_ = m;
    s.Symmetrize();
    return s;
  }

  static SymMatrix Identity(Eigen::Index dim) {
    SymMatrix s(dim);
    s.data_.setIdentity();
    return s;
  }

  static SymMatrix Diagonal(const Vector& d) {
    SymMatrix s(d.size());
    s.data_.diagonal() = d;
    return s;
  }

  Eigen::Index dim() const { return data_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
  const Matrix& matrix() const { return data_; }

  /// Sets (i,j) and (j,i) together.
  void set(Eigen::Index i, Eigen::Index j, double v) {
    data_(i, j) = v;
    data_(j, i) = v;
  }

  double frobenius_norm() const { return data_.norm(); }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.data_ == b.data_;
  }

 private:
  void Symmetrize() {
    const Eigen::Index n = data_.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j + 1; i < n; ++i) {
        const double v = 0.5 * (data_(i, j) + data_(j, i));
        data_(i, j) = v;
        data_(j, i) = v;
      }
    }
  }

  Matrix data_;
};

/// Trace inner product A . B = sum_ij A_ij B_ij.
inline double Inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}
inline double Inner(const SymMatrix& a, const SymMatrix& b) {
  return Inner(a.matrix(), b.matrix());
}

struct SpectralFactorization {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // column j pairs with eigenvalues(j)
};

namespace detail {

inline double OffDiagonalNorm(const Matrix& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal Frobenius mass
/// drops below 1e-12 * ||M||_F, then runs one polishing sweep.
inline SpectralFactorization SymEig(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw InputError("SymEig: matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw InputError("SymEig: non-finite entry");
  const Eigen::Index n = m.rows();
  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double norm = a.norm();
  const double target = 1e-12 * norm;

  constexpr int kMaxSweeps = 100;
  int polish = 1;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (detail::OffDiagonalNorm(a) <= target) {
      if (polish-- <= 0) break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation angle that annihilates a(p,q).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SpectralFactorization out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

inline SpectralFactorization SymEig(const SymMatrix& m) { return SymEig(m.matrix()); }

struct PsdFactor {
  Matrix columns;  // n x rank, column i = sqrt(lambda_i) v_i
  int rank = 0;
};

inline constexpr double kDefaultRankTol = 1e-7;

/// Factors M ~ V V^T keeping eigenvalues above rank_tol * (1 + lambda_max).
/// Throws if M has an eigenvalue below -rank_tol * (1 + lambda_max).
inline PsdFactor PsdFactorize(const Matrix& m, double rank_tol = kDefaultRankTol) {
  const SpectralFactorization eig = SymEig(m);
  const Eigen::Index n = m.rows();
  const double lmax = std::max(0.0, eig.eigenvalues(0));
  const double threshold = rank_tol * (1.0 + lmax);
  if (eig.eigenvalues(n - 1) < -threshold) {
    std::ostringstream os;
    os << "not PSD within tolerance: lambda_min = " << eig.eigenvalues(n - 1);
    throw NumericalError(os.str());
  }
  PsdFactor out;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (eig.eigenvalues(k) > threshold) ++out.rank;
  }
  out.columns.resize(n, out.rank);
  for (int k = 0; k < out.rank; ++k) {
    out.columns.col(k) = std::sqrt(eig.eigenvalues(k)) * eig.eigenvectors.col(k);
  }
  return out;
}

inline PsdFactor PsdFactorize(const SymMatrix& m, double rank_tol = kDefaultRankTol) {
  return PsdFactorize(m.matrix(), rank_tol);
}

// Scaled half-vectorization of S^r: diagonal entries as-is, off-diagonal
// entries times sqrt(2), so that Svec(A).dot(Svec(B)) == Inner(A, B).

inline Eigen::Index SvecSize(Eigen::Index r) { return r * (r + 1) / 2; }

inline Vector Svec(const Matrix& a) {
  const Eigen::Index r = a.rows();
  Vector out(SvecSize(r));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j) {
    out(k++) = a(j, j);
    for (Eigen::Index i = j + 1; i < r; ++i) {
      out(k++) = std::sqrt(2.0) * 0.5 * (a(i, j) + a(j, i));
    }
  }
  return out;
}

inline SymMatrix Smat(const Vector& v, Eigen::Index r) {
  if (v.size() != SvecSize(r)) throw InputError("Smat: size mismatch");
  SymMatrix out(r);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j) {
    out.set(j, j, v(k++));
    for (Eigen::Index i = j + 1; i < r; ++i) out.set(i, j, v(k++) / std::sqrt(2.0));
  }
  return out;
}

/// Basis of {D in S^r : <C_i, D> = 0 for all i}. Basis elements are
/// orthonormal in the trace inner product.
inline std::vector<SymMatrix> SymNullspace(const std::vector<Matrix>& constraints,
                                           Eigen::Index r) {
  if (r < 1) throw InputError("SymNullspace: r must be >= 1");
  const Eigen::Index d = SvecSize(r);
  std::vector<SymMatrix> basis;
  if (constraints.empty()) {
    for (Eigen::Index k = 0; k < d; ++k) basis.push_back(Smat(Vector::Unit(d, k), r));
    return basis;
  }
  Matrix system(static_cast<Eigen::Index>(constraints.size()), d);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i].rows() != r || constraints[i].cols() != r) {
      throw InputError("SymNullspace: constraint dimension mismatch");
    }
    system.row(static_cast<Eigen::Index>(i)) = Svec(constraints[i]).transpose();
  }
  // Full V is needed for the kernel, so run the SVD on a square padding.
  Matrix padded = Matrix::Zero(std::max(system.rows(), d), d);
  padded.topRows(system.rows()) = system;
  Eigen::JacobiSVD<Matrix> svd(padded, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff = 1e-12 * std::max(1.0, smax);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > cutoff) ++rank;
  }
  for (Eigen::Index k = rank; k < d; ++k) basis.push_back(Smat(svd.matrixV().col(k), r));
  return basis;
}

inline std::vector<SymMatrix> SymNullspace(const std::vector<SymMatrix>& constraints,
                                           Eigen::Index r) {
  std::vector<Matrix> mats;
  mats.reserve(constraints.size());
  for (const auto& c : constraints) mats.push_back(c.matrix());
  return SymNullspace(mats, r);
}

}  // namespace ecqp

#endif  // ECQP_LINALG_HPP_
