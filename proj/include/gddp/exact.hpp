#pragma once

// Fraction-exact linear algebra over an exact field scalar (Rational).
// Eigen's decompositions pivot on magnitudes and assume floating-point
// round-off, so the exact routines below use plain Gauss-Jordan elimination.

#include <utility>

#include "gddp/types.hpp"

namespace gddp {

namespace detail {

/// Reduces `m` in place to reduced row echelon form. Returns the rank and
/// accumulates the determinant of the leading square block in `det` when the
/// matrix is square and of full rank.
template <typename Scalar>
Index row_reduce(Matrix<Scalar>& m, Scalar* det = nullptr,
                 Matrix<Scalar>* companion = nullptr) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  Scalar d = 1;
  Index rank = 0;
  for (Index c = 0; c < cols && rank < rows; ++c) {
    Index pivot = rank;
    while (pivot < rows && m(pivot, c) == 0) ++pivot;
    if (pivot == rows) {
      d = 0;
      continue;
    }
    if (pivot != rank) {
      m.row(pivot).swap(m.row(rank));
      if (companion) companion->row(pivot).swap(companion->row(rank));
      d = -d;
    }
    const Scalar p = m(rank, c);
    d *= p;
    for (Index j = 0; j < cols; ++j) m(rank, j) /= p;
    if (companion)
      for (Index j = 0; j < companion->cols(); ++j) (*companion)(rank, j) /= p;
    for (Index r = 0; r < rows; ++r) {
      if (r == rank || m(r, c) == 0) continue;
      const Scalar f = m(r, c);
      for (Index j = 0; j < cols; ++j) m(r, j) -= f * m(rank, j);
      if (companion)
        for (Index j = 0; j < companion->cols(); ++j)
          (*companion)(r, j) -= f * (*companion)(rank, j);
    }
    ++rank;
  }
  if (det) *det = (rank == rows && rows == cols) ? d : Scalar(0);
  return rank;
}

}  // namespace detail

template <typename Scalar>
Index exact_rank(Matrix<Scalar> m) {
  return detail::row_reduce(m);
}

template <typename Scalar>
Scalar exact_determinant(Matrix<Scalar> m) {
  Scalar det;
  detail::row_reduce(m, &det);
  return det;
}

/// Exact inverse; throws SingularBasisError with the exact rank.
template <typename Scalar>
Matrix<Scalar> exact_inverse(const Matrix<Scalar>& m) {
  Matrix<Scalar> work = m;
  Matrix<Scalar> inv = Matrix<Scalar>::Identity(m.rows(), m.cols());
  const Index rank = detail::row_reduce(work, static_cast<Scalar*>(nullptr), &inv);
  if (rank < m.rows()) throw SingularBasisError(m.rows(), rank);
  return inv;
}

/// Solves x^T m = y^T exactly, i.e. expresses `y` in the row basis of `m`.
template <typename Scalar>
Vector<Scalar> exact_row_coordinates(const Matrix<Scalar>& m,
                                     const Vector<Scalar>& y) {
  if (y.size() != m.cols()) throw DimensionMismatchError(m.cols(), y.size());
  Matrix<Scalar> work = m.transpose();
  Matrix<Scalar> rhs = y;
  const Index rank = detail::row_reduce(work, static_cast<Scalar*>(nullptr), &rhs);
  if (rank < m.rows()) throw SingularBasisError(m.rows(), rank);
  return rhs.col(0);
}

}  // namespace gddp
