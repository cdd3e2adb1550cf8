#include "gddp/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "gddp/rng.hpp"

namespace gddp {

// ---------------------------------------------------------------- Basis

Basis::Basis(MatrixXq rows, std::string provenance,
             std::optional<std::uint64_t> seed)
    : rows_(std::move(rows)),
      provenance_(std::move(provenance)),
      seed_(seed) {
  if (rows_.rows() < 1) throw std::invalid_argument("basis dimension must be >= 1");
  if (rows_.rows() != rows_.cols())
    throw std::invalid_argument("basis must be square, got " +
                                std::to_string(rows_.rows()) + "x" +
                                std::to_string(rows_.cols()));
  det_ = exact_determinant(rows_);
  if (det_ == 0) throw SingularBasisError(dim(), exact_rank(rows_));
  rows_double_ = to_double(rows_);
}

Basis Basis::identity(Index n) {
  return Basis(MatrixXq::Identity(n, n), "Z^n");
}

Basis Basis::from_integers(const MatrixXi& rows, std::string provenance) {
  MatrixXq q(rows.rows(), rows.cols());
  for (Index i = 0; i < rows.rows(); ++i)
    for (Index j = 0; j < rows.cols(); ++j) q(i, j) = Rational(rows(i, j));
  return Basis(std::move(q), std::move(provenance));
}

Basis Basis::scaled(const Rational& c) const {
  if (c <= 0) throw std::invalid_argument("scale factor must be positive");
  MatrixXq q = rows_ * c;
  return Basis(std::move(q), provenance_ + "*scaled", seed_);
}

VectorXd Basis::embed(const VectorXi& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionMismatchError(dim(), coeffs.size());
  return rows_double_.transpose() * coeffs.cast<double>();
}

VectorXq Basis::embed_exact(const VectorXi& coeffs) const {
  if (coeffs.size() != dim()) throw DimensionMismatchError(dim(), coeffs.size());
  VectorXq out = VectorXq::Zero(dim());
  for (Index i = 0; i < dim(); ++i) {
    if (coeffs(i) == 0) continue;
    out += rows_.row(i).transpose() * Rational(coeffs(i));
  }
  return out;
}

LatticeVector LatticeVector::from_coeffs(const Basis& basis, VectorXi coeffs) {
  LatticeVector v;
  v.embedding = basis.embed(coeffs);
  v.norm_sq = v.embedding.squaredNorm();
  v.coeffs = std::move(coeffs);
  return v;
}

Target::Target(VectorXd values) : t(std::move(values)) {
  if (!t.allFinite()) throw std::invalid_argument("target has non-finite entries");
}

// ---------------------------------------------------------------- LLL

LllResult lll_reduce(const Basis& basis, double delta) {
  if (!(delta > 0.25 && delta < 1.0))
    throw std::invalid_argument("LLL delta must lie in (1/4, 1)");
  const Index n = basis.dim();
  MatrixXq b = basis.rows();
  MatrixXi u = MatrixXi::Identity(n, n);
  // GSO is recomputed from the exact rows after every change so that
  // rounding never accumulates across iterations.
  auto gso = [&] { return gram_schmidt<double>(to_double(b)); };
  GramSchmidt gs = gso();

  Index k = 1;
  while (k < n) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (Index j = k - 1; j >= 0; --j) {
        const double m = gs.mu(k, j);
        if (std::abs(m) <= 0.5 + 1e-12) continue;
        const auto q = static_cast<std::int64_t>(std::llround(m));
        b.row(k) -= b.row(j) * Rational(q);
        u.row(k) -= q * u.row(j);
        for (Index i = 0; i < j; ++i) gs.mu(k, i) -= static_cast<double>(q) * gs.mu(j, i);
        gs.mu(k, j) -= static_cast<double>(q);
        changed = true;
      }
      if (changed) gs = gso();
    }
    const double mu = gs.mu(k, k - 1);
    if (gs.norms(k) >= (delta - mu * mu) * gs.norms(k - 1) * (1.0 - 1e-12)) {
      ++k;
    } else {
      b.row(k).swap(b.row(k - 1));
      u.row(k).swap(u.row(k - 1));
      gs = gso();
      k = std::max<Index>(k - 1, 1);
    }
  }
  return {Basis(std::move(b), basis.provenance() + "+lll", basis.seed()), std::move(u)};
}

// ---------------------------------------------------------------- dual

Basis dual_basis(const Basis& basis) {
  MatrixXq d = exact_inverse(basis.rows()).transpose();
  return Basis(std::move(d), basis.provenance() + "+dual", basis.seed());
}

// ---------------------------------------------------------------- Babai

LatticeVector babai_nearest_plane(const Basis& basis, const Target& target) {
  const Index n = basis.dim();
  if (target.dim() != n) throw DimensionMismatchError(n, target.dim());
  const GramSchmidt gs = gram_schmidt(basis);
  const MatrixXd& b = basis.rows_double();
  VectorXd residual = target.t;
  VectorXi z(n);
  for (Index i = n - 1; i >= 0; --i) {
    const double c = residual.dot(gs.bstar.row(i)) / gs.norms(i);
    z(i) = static_cast<std::int64_t>(std::llround(c));
    residual -= static_cast<double>(z(i)) * b.row(i).transpose();
  }
  return LatticeVector::from_coeffs(basis, std::move(z));
}

double babai_bound_sq(const GramSchmidt& gs) { return gs.norms.sum() / 4.0; }

// ---------------------------------------------------------------- enumeration

BallEnumerator::BallEnumerator(const Basis& basis, std::uint64_t cap)
    : basis_(basis), reduced_(lll_reduce(basis)), gs_(gram_schmidt(reduced_.basis)), cap_(cap) {}

namespace {

struct EnumState {
  const GramSchmidt& gs;
  const VectorXd& gamma;  // center in Gram-Schmidt coordinates
  double radius_sq;
  std::uint64_t cap;
  std::vector<std::int64_t> z;
  std::vector<std::int64_t> found;  // flattened coefficient vectors
  std::uint64_t count = 0;
};

void enumerate_level(EnumState& st, Index level, double partial) {
  const Index n = st.gs.norms.size();
  double center = st.gamma(level);
  for (Index j = level + 1; j < n; ++j)
    center -= static_cast<double>(st.z[j]) * st.gs.mu(j, level);
  const double rem = st.radius_sq - partial;
  // Small slack so that boundary points survive rounding; the caller filters
  // on the directly computed distance.
  const double reach = std::sqrt(std::max(0.0, rem) / st.gs.norms(level)) * (1.0 + 1e-10) + 1e-12;
  const auto lo = static_cast<std::int64_t>(std::ceil(center - reach));
  const auto hi = static_cast<std::int64_t>(std::floor(center + reach));
  for (std::int64_t x = lo; x <= hi; ++x) {
    st.z[level] = x;
    const double d = static_cast<double>(x) - center;
    const double next = partial + d * d * st.gs.norms(level);
    if (level == 0) {
      if (++st.count > st.cap)
        throw BudgetExceededError("enumeration exceeded " + std::to_string(st.cap) + " points");
      st.found.insert(st.found.end(), st.z.begin(), st.z.end());
    } else {
      enumerate_level(st, level - 1, next);
    }
  }
}

}  // namespace

PointSet BallEnumerator::operator()(const VectorXd& center, double radius) const {
  const Index n = basis_.dim();
  if (center.size() != n) throw DimensionMismatchError(n, center.size());
  if (!(radius > 0.0)) throw std::invalid_argument("enumeration radius must be positive");

  VectorXd gamma(n);
  for (Index i = 0; i < n; ++i) gamma(i) = center.dot(gs_.bstar.row(i)) / gs_.norms(i);

  const double radius_sq = radius * radius;
  EnumState st{gs_, gamma, radius_sq * (1.0 + 1e-9), cap_, std::vector<std::int64_t>(n, 0), {}};
  enumerate_level(st, n - 1, 0.0);

  const Index m = static_cast<Index>(st.count);
  const MatrixXi reduced_coeffs = Eigen::Map<const MatrixXi>(st.found.data(), n, m);
  MatrixXi coeffs = reduced_.transform.transpose() * reduced_coeffs;

  MatrixXd emb = basis_.rows_double().transpose() * coeffs.cast<double>();
  VectorXd dist_sq = (emb.colwise() - center).colwise().squaredNorm().transpose();

  const double accept = radius_sq + 1e-12 * std::max(radius_sq, 1.0);
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j)
    if (dist_sq(j) <= accept) keep.push_back(j);
  std::sort(keep.begin(), keep.end(), [&](Index a, Index b) {
    return std::lexicographical_compare(coeffs.col(a).data(), coeffs.col(a).data() + n,
                                        coeffs.col(b).data(), coeffs.col(b).data() + n);
  });

  PointSet out;
  const Index k = static_cast<Index>(keep.size());
  out.coeffs.resize(n, k);
  out.embeddings.resize(n, k);
  out.dist_sq.resize(k);
  for (Index j = 0; j < k; ++j) {
    out.coeffs.col(j) = coeffs.col(keep[j]);
    out.embeddings.col(j) = emb.col(keep[j]);
    out.dist_sq(j) = dist_sq(keep[j]);
  }
  return out;
}

std::vector<LatticeVector> enumerate_ball(const Basis& basis, const VectorXd& center,
                                          double radius, std::uint64_t cap) {
  const PointSet ps = BallEnumerator(basis, cap)(center, radius);
  std::vector<LatticeVector> out;
  out.reserve(static_cast<std::size_t>(ps.size()));
  for (Index j = 0; j < ps.size(); ++j) {
    LatticeVector v;
    v.coeffs = ps.coeffs.col(j);
    v.embedding = ps.embeddings.col(j);
    v.norm_sq = v.embedding.squaredNorm();
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------- random bases

std::string to_string(BasisStyle style) {
  switch (style) {
    case BasisStyle::UniformInteger: return "uniform-integer";
    case BasisStyle::Knapsack: return "knapsack";
    case BasisStyle::ScaledIdentity: return "scaled-identity";
  }
  return "unknown";
}

BasisStyle basis_style_from_string(const std::string& name) {
  if (name == "uniform-integer") return BasisStyle::UniformInteger;
  if (name == "knapsack") return BasisStyle::Knapsack;
  if (name == "scaled-identity") return BasisStyle::ScaledIdentity;
  throw std::invalid_argument("unknown basis style '" + name + "'");
}

Basis random_basis(Index n, BasisStyle style, std::uint64_t seed,
                   const RandomBasisOptions& options) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (style == BasisStyle::ScaledIdentity) {
    MatrixXq q = MatrixXq::Identity(n, n) * options.scale;
    return Basis(std::move(q), "scaled-identity(c=" + options.scale.str() + ")", seed);
  }
  Rng rng(seed);
  for (int retries = 0;; ++retries) {
    MatrixXq q = MatrixXq::Zero(n, n);
    if (style == BasisStyle::UniformInteger) {
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          q(i, j) = Rational(rng.uniform_int(-options.bound, options.bound));
    } else {
      // q-ary knapsack shape: (q, 0, ..., 0) and (x_i, e_i) rows.
      q(0, 0) = Rational(options.modulus);
      for (Index i = 1; i < n; ++i) {
        q(i, 0) = Rational(rng.uniform_int(0, options.modulus - 1));
        q(i, i) = Rational(1);
      }
    }
    if (exact_determinant(q) == 0) continue;
    std::string tag = to_string(style);
    tag += style == BasisStyle::UniformInteger
               ? "(bound=" + std::to_string(options.bound)
               : "(q=" + std::to_string(options.modulus);
    tag += ", retries=" + std::to_string(retries) + ")";
    return Basis(std::move(q), std::move(tag), seed);
  }
}

// ---------------------------------------------------------------- membership

VectorXq exact_coordinates(const Basis& basis, const VectorXq& point) {
  return exact_row_coordinates(basis.rows(), point);
}

bool is_lattice_point(const Basis& basis, const VectorXq& point) {
  const VectorXq c = exact_coordinates(basis, point);
  for (Index i = 0; i < c.size(); ++i)
    if (denominator(c(i)) != 1) return false;
  return true;
}

}  // namespace gddp
