#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gddp/exact.hpp"
#include "gddp/types.hpp"

namespace gddp {

/// A full-rank lattice basis with exact rational entries; rows are b_1..b_n.
class Basis {
 public:
  explicit Basis(MatrixXq rows, std::string provenance = {},
                 std::optional<std::uint64_t> seed = std::nullopt);

  static Basis identity(Index n);
  static Basis from_integers(const MatrixXi& rows, std::string provenance = {});

  Index dim() const { return rows_.rows(); }
  const MatrixXq& rows() const { return rows_; }
  /// Rows rounded to double; exact for integer and dyadic entries.
  const MatrixXd& rows_double() const { return rows_double_; }
  const std::string& provenance() const { return provenance_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  const Rational& determinant() const { return det_; }

  /// c·L as a new basis (same coefficient space).
  Basis scaled(const Rational& c) const;

  /// Σ z_i b_i evaluated in double precision.
  VectorXd embed(const VectorXi& coeffs) const;
  /// Σ z_i b_i evaluated exactly.
  VectorXq embed_exact(const VectorXi& coeffs) const;

 private:
  MatrixXq rows_;
  MatrixXd rows_double_;
  std::string provenance_;
  std::optional<std::uint64_t> seed_;
  Rational det_;
};

/// Gram-Schmidt data for a row basis: rows = (mu + I) * bstar.
template <typename Scalar>
struct GramSchmidtT {
  Matrix<Scalar> bstar;
  Matrix<Scalar> mu;     // strictly lower triangular
  Vector<Scalar> norms;  // squared norms of the bstar rows
};
using GramSchmidt = GramSchmidtT<double>;

template <typename Scalar>
GramSchmidtT<Scalar> gram_schmidt(const Matrix<Scalar>& b) {
  const Index n = b.rows();
  GramSchmidtT<Scalar> gs;
  gs.bstar = b;
  gs.mu = Matrix<Scalar>::Zero(n, n);
  gs.norms = Vector<Scalar>::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      gs.mu(i, j) = b.row(i).dot(gs.bstar.row(j)) / gs.norms(j);
      gs.bstar.row(i) -= gs.mu(i, j) * gs.bstar.row(j);
    }
    gs.norms(i) = gs.bstar.row(i).squaredNorm();
    if (gs.norms(i) == Scalar(0))
      throw SingularBasisError(n, exact_rank(Matrix<Scalar>(b)));
  }
  return gs;
}

inline GramSchmidt gram_schmidt(const Basis& basis) {
  return gram_schmidt<double>(basis.rows_double());
}

/// A lattice point: integer coefficients over a basis plus its embedding.
struct LatticeVector {
  VectorXi coeffs;
  VectorXd embedding;
  double norm_sq = 0.0;

  static LatticeVector from_coeffs(const Basis& basis, VectorXi coeffs);
};

/// A target point in R^n with finite entries.
struct Target {
  VectorXd t;

  Target() = default;
  explicit Target(VectorXd values);
  Index dim() const { return t.size(); }
};

struct LllResult {
  Basis basis;
  /// Unimodular integer matrix with reduced.rows() == transform * input.rows().
  MatrixXi transform;
};

inline constexpr double kDefaultLllDelta = 0.99;

LllResult lll_reduce(const Basis& basis, double delta = kDefaultLllDelta);

/// Rows of the returned basis span the dual lattice: D * B^T = I.
Basis dual_basis(const Basis& basis);

LatticeVector babai_nearest_plane(const Basis& basis, const Target& target);

/// Σ ‖b̃_i‖² / 4, the squared-distance guarantee of nearest-plane decoding.
double babai_bound_sq(const GramSchmidt& gs);

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

/// Lattice points inside a ball, stored column-wise.
struct PointSet {
  MatrixXi coeffs;      // n x m, over the basis given to the enumerator
  MatrixXd embeddings;  // n x m
  VectorXd dist_sq;     // ‖y - center‖²

  Index size() const { return coeffs.cols(); }
};

/// Fincke-Pohst enumeration over a cached LLL-reduced copy of the basis.
class BallEnumerator {
 public:
  explicit BallEnumerator(const Basis& basis,
                          std::uint64_t cap = kDefaultEnumerationCap);

  /// All y in L with ‖y - center‖ <= radius, sorted by coefficient vector.
  PointSet operator()(const VectorXd& center, double radius) const;

  const Basis& basis() const { return basis_; }
  const LllResult& reduced() const { return reduced_; }
  std::uint64_t cap() const { return cap_; }

 private:
  Basis basis_;
  LllResult reduced_;
  GramSchmidt gs_;
  std::uint64_t cap_;
};

std::vector<LatticeVector> enumerate_ball(
    const Basis& basis, const VectorXd& center, double radius,
    std::uint64_t cap = kDefaultEnumerationCap);

enum class BasisStyle { UniformInteger, Knapsack, ScaledIdentity };

struct RandomBasisOptions {
  std::int64_t bound = 5;         // uniform-integer entries in [-bound, bound]
  std::int64_t modulus = 1024;    // knapsack modulus q
  Rational scale = Rational(1);   // scaled-identity factor c
};

Basis random_basis(Index n, BasisStyle style, std::uint64_t seed,
                   const RandomBasisOptions& options = {});

std::string to_string(BasisStyle style);
BasisStyle basis_style_from_string(const std::string& name);

/// Exact coordinates of `point` over the basis rows.
VectorXq exact_coordinates(const Basis& basis, const VectorXq& point);

/// True iff `point` (exact) lies in L.
bool is_lattice_point(const Basis& basis, const VectorXq& point);

}  // namespace gddp
