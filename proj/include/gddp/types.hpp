#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace gddp {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXq = Matrix<Rational>;
using VectorXq = Vector<Rational>;
using MatrixXi = Matrix<std::int64_t>;
using VectorXi = Vector<std::int64_t>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Tolerance for floating-point views of exact quantities.
inline constexpr double kRelTol = 1e-9;

class SingularBasisError : public std::runtime_error {
 public:
  SingularBasisError(Index dimension, Index rank)
      : std::runtime_error("singular basis: dimension " +
                           std::to_string(dimension) + " but exact rank " +
                           std::to_string(rank)),
        rank_(rank) {}
  Index rank() const { return rank_; }

 private:
  Index rank_;
};

class BudgetExceededError : public std::runtime_error {
 public:
  explicit BudgetExceededError(const std::string& what)
      : std::runtime_error("budget exceeded: " + what +
                           " (dimension/radius too large for exact mode)") {}
};

class WidthTooSmallError : public std::runtime_error {
 public:
  WidthTooSmallError(double s, double threshold)
      : std::runtime_error("width too small for Klein sampler: s = " +
                           std::to_string(s) + " < " +
                           std::to_string(threshold)),
        s_(s),
        threshold_(threshold) {}
  double s() const { return s_; }
  double threshold() const { return threshold_; }

 private:
  double s_;
  double threshold_;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  DimensionMismatchError(Index expected, Index got)
      : std::invalid_argument("dimension mismatch: expected " +
                              std::to_string(expected) + ", got " +
                              std::to_string(got)) {}
};

class BracketNotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Converts an exact rational to the nearest double.
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact rational value of a finite double.
inline Rational to_rational(double x) { return Rational(x); }

template <typename Derived>
MatrixXd to_double(const Eigen::MatrixBase<Derived>& m) {
  MatrixXd out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

}  // namespace gddp
