// Copyright 2026 The dualspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Orthogonal projectors onto the column span of a dense matrix.
//
// Everything here is a pure function of its inputs. The SVD is Eigen's
// two-sided Jacobi with column-pivoting QR preconditioning, chosen because it
// is deterministic and accurate for the small, tall matrices that concept
// lists produce (D up to a few thousand, K up to a few hundred).

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

#include "dualspace/errors.hpp"

namespace dualspace {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kDefaultRelTol = 1e-6;

namespace detail {

inline std::string shape_string(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

template <typename Derived>
void require_finite_nonempty(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidInput(std::string(what) + ": empty matrix (" +
                       shape_string(m.rows(), m.cols()) + ")");
  }
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
  }
}

template <typename Scalar>
void require_positive_tol(Scalar rel_tol) {
  if (!(rel_tol > Scalar(0)) || !std::isfinite(rel_tol)) {
    throw InvalidInput("relative tolerance must be positive and finite");
  }
}

}  // namespace detail

/// Thin SVD, M = U diag(sigma) W^T, singular values non-increasing.
template <typename Scalar = double>
struct SvdResult {
  MatrixX<Scalar> left_vectors;     // D x min(D, K)
  VectorX<Scalar> singular_values;  // min(D, K)
  MatrixX<Scalar> right_vectors;    // K x min(D, K)

  MatrixX<Scalar> reconstruct() const {
    return left_vectors * singular_values.asDiagonal() * right_vectors.transpose();
  }
};

/// Symmetric idempotent D x D matrix together with its rank.
///
/// Instances coming out of range_projector / complement_projector are correct
/// by construction. Matrices from elsewhere (a deserialized bundle, say) go
/// through from_matrix, which checks the invariants.
template <typename Scalar = double>
class Projector {
 public:
  using MatrixType = MatrixX<Scalar>;

  /// Wraps an externally produced matrix. Throws InvalidData when it is not
  /// square, not finite, not symmetric, not idempotent, or when its trace
  /// disagrees with `rank`.
  static Projector from_matrix(MatrixType matrix, Eigen::Index rank, Scalar tolerance_used) {
    Projector p(std::move(matrix), rank, tolerance_used);
    p.validate();
    return p;
  }

  static Projector zero(Eigen::Index dim, Scalar tolerance_used) {
    return Projector(MatrixType::Zero(dim, dim), 0, tolerance_used);
  }

  static Projector identity(Eigen::Index dim, Scalar tolerance_used) {
    return Projector(MatrixType::Identity(dim, dim), dim, tolerance_used);
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  Eigen::Index rank() const { return rank_; }
  Scalar tolerance_used() const { return tolerance_used_; }
  const MatrixType& matrix() const { return matrix_; }

  template <typename Derived>
  auto operator*(const Eigen::MatrixBase<Derived>& v) const {
    return matrix_ * v;
  }

  /// Throws InvalidData describing the first violated invariant.
  void validate() const {
    if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols()) {
      throw InvalidData("projector must be square, got " +
                        detail::shape_string(matrix_.rows(), matrix_.cols()));
    }
    if (!matrix_.allFinite()) throw InvalidData("projector has non-finite entries");
    if (rank_ < 0 || rank_ > dim()) throw InvalidData("projector rank out of range");
    const Scalar scale = std::max(Scalar(1), matrix_.norm());
    if ((matrix_ - matrix_.transpose()).norm() > Scalar(1e-8) * scale) {
      throw InvalidData("projector is not symmetric");
    }
    if ((matrix_ * matrix_ - matrix_).norm() > Scalar(1e-6) * scale) {
      throw InvalidData("projector is not idempotent");
    }
    if (std::abs(matrix_.trace() - Scalar(rank_)) > Scalar(1e-5)) {
      throw InvalidData("projector trace does not match its rank");
    }
  }

 private:
  Projector(MatrixType matrix, Eigen::Index rank, Scalar tolerance_used)
      : matrix_(std::move(matrix)), rank_(rank), tolerance_used_(tolerance_used) {}

  template <typename D>
  friend Projector<typename D::Scalar> range_projector(const Eigen::MatrixBase<D>&,
                                                       typename D::Scalar);
  template <typename S>
  friend Projector<S> complement_projector(const Projector<S>&);
  template <typename D>
  friend Projector<typename D::Scalar> oracle_projector(const Eigen::MatrixBase<D>&);
  template <typename D>
  friend Projector<typename D::Scalar> alignment_projector(const Eigen::MatrixBase<D>&,
                                                           typename D::Scalar);

  MatrixType matrix_;
  Eigen::Index rank_ = 0;
  Scalar tolerance_used_ = Scalar(kDefaultRelTol);
};

template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite_nonempty(m, "svd");
  const MatrixX<Scalar> a = m;
  Eigen::JacobiSVD<MatrixX<Scalar>> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("svd did not converge for " +
                           detail::shape_string(m.rows(), m.cols()) + " matrix");
  }
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

/// Number of singular values strictly above rel_tol * sigma_max.
/// Input must be non-increasing and non-negative.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& singular_values,
                            typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_positive_tol(rel_tol);
  const Eigen::Index n = singular_values.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar s = singular_values(i);
    if (!std::isfinite(s) || s < Scalar(0)) {
      throw InvalidInput("singular values must be finite and non-negative");
    }
    if (i > 0 && s > singular_values(i - 1)) {
      throw InvalidInput("singular values must be sorted non-increasing");
    }
  }
  if (n == 0 || singular_values(0) == Scalar(0)) return 0;
  const Scalar cutoff = rel_tol * singular_values(0);
  Eigen::Index rank = 0;
  while (rank < n && singular_values(rank) > cutoff) ++rank;
  return rank;
}

/// Orthogonal projector onto Range(M) built from the leading left singular
/// vectors. A zero matrix gives the zero projector.
template <typename Derived>
Projector<typename Derived::Scalar> range_projector(const Eigen::MatrixBase<Derived>& m,
                                                    typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_positive_tol(rel_tol);
  const auto decomposition = svd(m);
  const Eigen::Index rank = numerical_rank(decomposition.singular_values, rel_tol);
  const auto basis = decomposition.left_vectors.leftCols(rank);
  MatrixX<Scalar> p = basis * basis.transpose();
  // exact symmetry survives float32 serialization
  p = Scalar(0.5) * (p + p.transpose()).eval();
  return Projector<Scalar>(std::move(p), rank, rel_tol);
}

template <typename Derived>
Projector<typename Derived::Scalar> range_projector(const Eigen::MatrixBase<Derived>& m) {
  return range_projector(m, typename Derived::Scalar(kDefaultRelTol));
}

/// I - P. Projects onto the orthogonal complement of Range(P).
template <typename Scalar>
Projector<Scalar> complement_projector(const Projector<Scalar>& p) {
  const Eigen::Index d = p.dim();
  return Projector<Scalar>(MatrixX<Scalar>::Identity(d, d) - p.matrix(), d - p.rank(),
                           p.tolerance_used());
}

/// Moore-Penrose pseudoinverse, W diag(1/sigma) U^T over the singular values
/// above rel_tol * sigma_max.
template <typename Derived>
MatrixX<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& m,
                                                typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_positive_tol(rel_tol);
  const auto decomposition = svd(m);
  const Eigen::Index rank = numerical_rank(decomposition.singular_values, rel_tol);
  const VectorX<Scalar> inv = decomposition.singular_values.head(rank).cwiseInverse();
  return decomposition.right_vectors.leftCols(rank) * inv.asDiagonal() *
         decomposition.left_vectors.leftCols(rank).transpose();
}

template <typename Derived>
MatrixX<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& m) {
  return pseudoinverse(m, typename Derived::Scalar(kDefaultRelTol));
}

/// Projector onto Range(M) written as M M^+, the alignment form. Agrees with
/// range_projector up to rounding; kept as a second construction.
template <typename Derived>
Projector<typename Derived::Scalar> alignment_projector(const Eigen::MatrixBase<Derived>& m,
                                                        typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> a = m;
  MatrixX<Scalar> p = a * pseudoinverse(a, rel_tol);
  p = Scalar(0.5) * (p + p.transpose()).eval();
  const Eigen::Index rank = numerical_rank(svd(a).singular_values, rel_tol);
  return Projector<Scalar>(std::move(p), rank, rel_tol);
}

/// Reference projector from modified Gram-Schmidt (with one
/// reorthogonalization sweep) over the columns of M. Columns whose residual
/// norm falls to 1e-10 or below are dropped. Meant for verification on small
/// inputs (D <= 64, K <= 16); it does not touch the SVD path.
template <typename Derived>
Projector<typename Derived::Scalar> oracle_projector(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index d = m.rows();
  MatrixX<Scalar> basis(d, 0);
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    VectorX<Scalar> v = m.col(k);
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        v -= basis.col(j).dot(v) * basis.col(j);
      }
    }
    const Scalar residual = v.norm();
    if (residual <= Scalar(1e-10)) continue;
    basis.conservativeResize(d, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / residual;
  }
  MatrixX<Scalar> p = MatrixX<Scalar>::Zero(d, d);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    p += basis.col(j) * basis.col(j).transpose();
  }
  return Projector<Scalar>(std::move(p), basis.cols(), Scalar(1e-10));
}

}  // namespace dualspace
