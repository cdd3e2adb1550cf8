#include "gddp/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gddp/rng.hpp"

namespace gddp {

double compensated_sum(const VectorXd& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double t = sum + v(i);
    comp += std::abs(sum) >= std::abs(v(i)) ? (sum - t) + v(i) : (v(i) - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double tail_fraction(Index n, double radius, double s) {
  const double r = radius / (std::sqrt(static_cast<double>(n)) * s);
  return std::exp(log_banaszczyk_tail(n, r));
}

GaussianParam::GaussianParam(double width) : s(width) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("Gaussian width must be positive and finite");
}

double log_banaszczyk_tail(Index n, double r) {
  if (r < 1.0 / std::sqrt(2.0 * kPi)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(n) * (std::log(r) + 0.5 * std::log(2.0 * kPi * std::exp(1.0)) - kPi * r * r);
}

double radius_for_tail(Index n, double s, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("tail fraction must lie in (0, 1)");
  const double target = std::log(fraction);
  double lo = 1.0 / std::sqrt(2.0 * kPi);
  double hi = 1.0;
  while (log_banaszczyk_tail(n, hi) > target) hi *= 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_banaszczyk_tail(n, mid) > target ? lo : hi) = mid;
  }
  return hi * std::sqrt(static_cast<double>(n)) * s;
}

GaussianWindow centered_window(const BallEnumerator& enumerator, double s, double radius) {
  const Index n = enumerator.basis().dim();
  GaussianWindow w;
  w.center = VectorXd::Zero(n);
  w.s = s;
  w.radius = radius;
  w.points = enumerator(w.center, radius);
  w.weights = (-kPi / (s * s) * w.points.dist_sq.array()).exp().matrix();
  w.partial = compensated_sum(w.weights);
  const double f = tail_fraction(n, radius, s);
  w.tail = f < 1.0 ? w.partial * f / (1.0 - f) : std::numeric_limits<double>::infinity();
  return w;
}

GaussianWindow shifted_window(const BallEnumerator& enumerator, double s, const VectorXd& center,
                              double radius, double lattice_mass_upper) {
  const Index n = enumerator.basis().dim();
  GaussianWindow w;
  w.center = center;
  w.s = s;
  w.radius = radius;
  w.points = enumerator(center, radius);
  w.weights = (-kPi / (s * s) * w.points.dist_sq.array()).exp().matrix();
  w.partial = compensated_sum(w.weights);
  w.tail = 2.0 * tail_fraction(n, radius, s) * lattice_mass_upper;
  return w;
}

VectorXd reduce_shift(const BallEnumerator& enumerator, const VectorXd& shift) {
  const LatticeVector near = babai_nearest_plane(enumerator.reduced().basis, Target(shift));
  return shift - near.embedding;
}

MassEstimate gaussian_mass(const BallEnumerator& enumerator, GaussianParam s, const VectorXd& shift,
                           double rel_tol) {
  const Index n = enumerator.basis().dim();
  if (shift.size() != n) throw DimensionMismatchError(n, shift.size());
  if (!(rel_tol >= 1e-14)) throw std::invalid_argument("rel_tol must be >= 1e-14");

  const double r0 = radius_for_tail(n, s, rel_tol / 4.0);
  const GaussianWindow base = centered_window(enumerator, s, r0);
  const double mass_upper = (base.partial + base.tail) * (1.0 + kSumRoundingSlack);

  const VectorXd reduced = reduce_shift(enumerator, shift);
  if (reduced.isZero(0.0)) {
    MassEstimate m;
    m.value = base.partial;
    m.truncation_radius = r0;
    m.tail_bound = base.tail + kSumRoundingSlack * base.partial;
    m.relative_error_bound = m.tail_bound / m.value;
    return m;
  }

  double radius = r0;
  for (int attempt = 0; attempt < 64; ++attempt, radius *= 1.25) {
    const GaussianWindow w = shifted_window(enumerator, s, reduced, radius, mass_upper);
    const double tail = w.tail + kSumRoundingSlack * w.partial;
    if (w.partial > 0.0 && tail <= rel_tol * w.partial) {
      MassEstimate m;
      m.value = w.partial;
      m.truncation_radius = radius;
      m.tail_bound = tail;
      m.relative_error_bound = tail / w.partial;
      return m;
    }
  }
  throw BudgetExceededError("shifted mass did not reach rel_tol");
}

MassEstimate gaussian_mass(const Basis& basis, GaussianParam s, const VectorXd& shift,
                           double rel_tol, std::uint64_t cap) {
  return gaussian_mass(BallEnumerator(basis, cap), s, shift, rel_tol);
}

// ---------------------------------------------------------------- smoothing

namespace {

/// Certified comparisons of rho_w(L) against a threshold, reusing one growing
/// enumeration of the lattice around the origin.
class MassOracle {
 public:
  MassOracle(const Basis& lattice, double threshold, double tail_target, std::uint64_t cap)
      : enumerator_(lattice, cap), n_(lattice.dim()), threshold_(threshold), tail_target_(tail_target) {}

  /// +1 when the mass certainly exceeds the threshold, -1 when certainly
  /// below, 0 when the certified interval straddles it.
  int compare(double width) {
    const double full = radius_for_tail(n_, width, tail_target_);
    for (;;) {
      if (radius_ >= full) {
        const Interval m = evaluate(width);
        if (m.lo > threshold_) return 1;
        if (m.hi < threshold_) return -1;
        return 0;
      }
      if (lower_sum(width) * (1.0 - kSumRoundingSlack) > threshold_) return 1;
      grow(std::min(full, std::max(2.0 * radius_, 0.5 * full)));
    }
  }

  Interval evaluate(double width) {
    const double full = radius_for_tail(n_, width, tail_target_);
    if (radius_ < full) grow(full);
    const double partial = lower_sum(width);
    const double f = tail_fraction(n_, radius_, width);
    const double tail = f < 1.0 ? partial * f / (1.0 - f) : std::numeric_limits<double>::infinity();
    return {partial * (1.0 - kSumRoundingSlack), (partial + tail) * (1.0 + kSumRoundingSlack)};
  }

 private:
  void grow(double radius) {
    const PointSet ps = enumerator_(VectorXd::Zero(n_), radius);
    norms_.assign(ps.dist_sq.data(), ps.dist_sq.data() + ps.dist_sq.size());
    std::sort(norms_.begin(), norms_.end());
    radius_ = radius;
  }

  // Sum over cached points, smallest terms first.
  double lower_sum(double width) const {
    const double k = -kPi / (width * width);
    double sum = 0.0;
    double comp = 0.0;
    for (auto it = norms_.rbegin(); it != norms_.rend(); ++it) {
      const double x = std::exp(k * *it);
      const double t = sum + x;
      comp += (sum - t) + x;
      sum = t;
    }
    return sum + comp;
  }

  BallEnumerator enumerator_;
  Index n_;
  double threshold_;
  double tail_target_;
  double radius_ = 0.0;
  std::vector<double> norms_;
};

constexpr double kDualTailTarget = 1e-14;

}  // namespace

Interval dual_mass(const Basis& dual, double width, double rel_tol, std::uint64_t cap) {
  MassOracle oracle(dual, kSmoothingThreshold, rel_tol / 2.0, cap);
  return oracle.evaluate(width);
}

SmoothingEstimate smoothing_parameter(const Basis& basis, double tol, double threshold,
                                      std::uint64_t cap) {
  if (!(threshold > 1.0 && threshold < 2.0))
    throw std::invalid_argument("smoothing threshold must lie in (1, 2)");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Index n = basis.dim();
  const double eps = threshold - 1.0;

  const Basis dual = lll_reduce(dual_basis(basis)).basis;
  const Basis primal = lll_reduce(basis).basis;
  const GramSchmidt gs = gram_schmidt(primal);

  // rho_{1/s}(L*) >= 1 + 2 exp(-pi s² ‖d‖²) for any nonzero dual vector d,
  // which exceeds the threshold below `lo`.
  double shortest_dual = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) shortest_dual = std::min(shortest_dual, dual.rows_double().row(i).norm());
  double lo = std::sqrt(std::log(2.0 / eps) / kPi) / shortest_dual * (1.0 - 1e-9);
  // eta_eps(L) <= max ‖b̃_i‖ sqrt(ln(2n(1 + 1/eps)) / pi).
  double hi = std::sqrt(gs.norms.maxCoeff()) *
              std::sqrt(std::log(2.0 * static_cast<double>(n) * (1.0 + 1.0 / eps)) / kPi);
  hi = std::max(hi, lo * 1.5);

  MassOracle oracle(dual, threshold, kDualTailTarget, cap);
  int expansions = 0;
  while (oracle.compare(1.0 / hi) >= 0) {
    if (++expansions > 64) throw BracketNotFoundError("no upper bracket for the smoothing parameter");
    hi *= 2.0;
  }

  SmoothingEstimate est;
  while (hi - lo > tol * lo) {
    const double mid = std::sqrt(lo * hi);
    const int c = oracle.compare(1.0 / mid);
    ++est.iterations;
    if (c > 0) {
      lo = mid;
    } else if (c < 0) {
      hi = mid;
    } else {
      break;  // certified interval straddles the threshold: precision floor
    }
  }
  est.bracket = {lo, hi};
  est.eta = std::sqrt(lo * hi);
  est.dual_mass_interval = oracle.evaluate(1.0 / est.eta);
  est.dual_mass_at_eta = est.dual_mass_interval.mid();
  if (std::abs(est.dual_mass_at_eta - threshold) > 1e-6)
    throw BracketNotFoundError("dual mass at eta misses the threshold by " +
                               std::to_string(est.dual_mass_at_eta - threshold));
  return est;
}

// ---------------------------------------------------------------- samplers

std::string to_string(SamplerKind kind) { return kind == SamplerKind::Exact ? "exact" : "klein"; }

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "exact") return SamplerKind::Exact;
  if (name == "klein") return SamplerKind::Klein;
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

double exact_sampler_tail_fraction(Index n) { return std::ldexp(1e-3, -static_cast<int>(n)); }

ExactDistribution exact_distribution(const BallEnumerator& enumerator, double s) {
  const Index n = enumerator.basis().dim();
  const double radius = radius_for_tail(n, s, exact_sampler_tail_fraction(n));
  GaussianWindow w = centered_window(enumerator, s, radius);
  ExactDistribution d;
  d.probabilities = w.weights / w.partial;
  d.support = std::move(w.points);
  return d;
}

SampleSet sample_exact(const Basis& basis, GaussianParam s, std::size_t count, std::uint64_t seed,
                       std::uint64_t cap) {
  const BallEnumerator enumerator(basis, cap);
  const ExactDistribution dist = exact_distribution(enumerator, s);
  std::vector<double> cdf(static_cast<std::size_t>(dist.probabilities.size()));
  double acc = 0.0;
  for (Index j = 0; j < dist.probabilities.size(); ++j) cdf[static_cast<std::size_t>(j)] = acc += dist.probabilities(j);

  SampleSet out;
  out.s = s;
  out.sampler = SamplerKind::Exact;
  out.seed = seed;
  out.samples.reserve(count);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const Index j = it - cdf.begin();
    out.samples.push_back(LatticeVector::from_coeffs(basis, dist.support.coeffs.col(j)));
  }
  return out;
}

double klein_min_width(const GramSchmidt& gs, double quality) {
  const double n = static_cast<double>(gs.norms.size());
  return quality * std::sqrt(gs.norms.maxCoeff()) * std::sqrt(std::log(2.0 * n * 1e4) / kPi);
}

namespace {

// Window half-width in units of the width; mass beyond it is below exp(-pi 144).
constexpr double kIntegerTail = 12.0;

std::int64_t sample_integer_gaussian(Rng& rng, double width, double center) {
  const auto lo = static_cast<std::int64_t>(std::ceil(center - kIntegerTail * width));
  const auto hi = static_cast<std::int64_t>(std::floor(center + kIntegerTail * width));
  for (;;) {
    const std::int64_t x = rng.uniform_int(lo, hi);
    const double d = static_cast<double>(x) - center;
    if (rng.uniform() < std::exp(-kPi * d * d / (width * width))) return x;
  }
}

}  // namespace

SampleSet sample_klein(const Basis& basis, GaussianParam s, std::size_t count, std::uint64_t seed,
                       double quality) {
  const Index n = basis.dim();
  const GramSchmidt gs = gram_schmidt(basis);
  const double min_width = klein_min_width(gs, quality);
  if (s < min_width) throw WidthTooSmallError(s, min_width);

  // Each conditional width s/‖b̃_i‖ is at least eta_eps(Z) for
  // eps = sum_{k != 0} exp(-pi k² w²), w the smallest conditional width.
  const double w_min = s / std::sqrt(gs.norms.maxCoeff());
  double eps = 0.0;
  for (int k = 1; k < 64; ++k) eps += 2.0 * std::exp(-kPi * k * k * w_min * w_min);
  const double ratio = (1.0 - eps) / (1.0 + eps);

  SampleSet out;
  out.s = s;
  out.sampler = SamplerKind::Klein;
  out.seed = seed;
  out.stat_distance_bound = 1.0 - std::pow(ratio, static_cast<double>(n));
  out.samples.reserve(count);

  const MatrixXd& b = basis.rows_double();
  Rng rng(seed);
  for (std::size_t draw = 0; draw < count; ++draw) {
    VectorXd c = VectorXd::Zero(n);
    VectorXi z(n);
    for (Index i = n - 1; i >= 0; --i) {
      const double norm = std::sqrt(gs.norms(i));
      const double center = c.dot(gs.bstar.row(i)) / gs.norms(i);
      z(i) = sample_integer_gaussian(rng, s / norm, center);
      c -= static_cast<double>(z(i)) * b.row(i).transpose();
    }
    out.samples.push_back(LatticeVector::from_coeffs(basis, std::move(z)));
  }
  return out;
}

// ---------------------------------------------------------------- Banaszczyk

BanaszczykReport banaszczyk_check(const BallEnumerator& enumerator, GaussianParam s) {
  const Index n = enumerator.basis().dim();
  const double bound = std::ldexp(1.0, -static_cast<int>(n));
  const double cutoff_sq = static_cast<double>(n) * s * s;
  const double radius = std::max(radius_for_tail(n, s, 1e-12 * bound), 1.01 * std::sqrt(cutoff_sq));
  const GaussianWindow w = centered_window(enumerator, s, radius);

  VectorXd outer(w.weights.size());
  for (Index j = 0; j < w.weights.size(); ++j)
    outer(j) = w.points.dist_sq(j) >= cutoff_sq ? w.weights(j) : 0.0;
  const double outer_sum = compensated_sum(outer);

  BanaszczykReport r;
  r.bound = bound;
  r.probability.lo = outer_sum * (1.0 - kSumRoundingSlack) / ((w.partial + w.tail) * (1.0 + kSumRoundingSlack));
  r.probability.hi = (outer_sum + w.tail) * (1.0 + kSumRoundingSlack) / (w.partial * (1.0 - kSumRoundingSlack));
  r.pass = r.probability.hi <= bound;
  return r;
}

BanaszczykReport banaszczyk_check(const Basis& basis, GaussianParam s, std::uint64_t cap) {
  return banaszczyk_check(BallEnumerator(basis, cap), s);
}

}  // namespace gddp
