#include "gddp/gddp.hpp"

#include <cmath>
#include <utility>

#include <boost/multiprecision/mpfr.hpp>

namespace gddp {

// ---------------------------------------------------------------- parameters

BigInt n_alpha(Index n, double alpha) {
  using boost::multiprecision::mpfr_float;
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  const double root = std::pow(static_cast<double>(n), 0.5 - alpha) + 4.0;
  const double exponent = root * root;
  // Enough decimal digits for the integer part plus a guard.
  const auto digits = static_cast<unsigned>(exponent / std::log(10.0) + 2.0 * std::log10(static_cast<double>(n)) + 40.0);
  const unsigned saved = mpfr_float::default_precision();
  mpfr_float::default_precision(digits);
  const mpfr_float nn(static_cast<long>(n));
  const mpfr_float r = pow(nn, mpfr_float(0.5) - mpfr_float(alpha)) + 4;
  const mpfr_float value = nn * nn * exp(r * r);
  const mpfr_float rounded = ceil(value);
  const std::string text = rounded.str(0, std::ios_base::fixed);
  mpfr_float::default_precision(saved);
  return BigInt(text.substr(0, text.find('.')));
}

bool in_theorem_regime(Index n, double alpha) {
  if (n < 2 || alpha > 0.5) return false;
  return alpha >= 2.0 / std::log2(static_cast<double>(n));
}

double guarantee_distance(Index n, double alpha, double s) {
  return std::pow(static_cast<double>(n), 0.5 + alpha) * s;
}

// ---------------------------------------------------------------- preprocessing

Preprocessing::Preprocessing(GddpParams p, Basis b, LllResult r, SmoothingEstimate sm, SampleSet v,
                             BigInt na, std::vector<std::string> w)
    : params(std::move(p)),
      basis(std::move(b)),
      reduced(std::move(r)),
      smoothing(std::move(sm)),
      vectors(std::move(v)),
      n_alpha(std::move(na)),
      warnings(std::move(w)) {
  const Index n = basis.dim();
  const auto count = static_cast<Index>(vectors.samples.size());
  embeddings.resize(n, count);
  norms_sq.resize(count);
  for (Index i = 0; i < count; ++i) {
    const LatticeVector& y = vectors.samples[static_cast<std::size_t>(i)];
    if (y.coeffs.size() != n) throw DimensionMismatchError(n, y.coeffs.size());
    embeddings.col(i) = y.embedding;
    norms_sq(i) = y.norm_sq;
  }
}

Preprocessing preprocess(const Basis& basis, double alpha, std::optional<std::uint64_t> override_N,
                         std::uint64_t seed, const PreprocessOptions& options) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw std::invalid_argument("alpha must lie in [0, 1/2]");
  const Index n = basis.dim();
  std::vector<std::string> warnings;

  SmoothingEstimate sm = smoothing_parameter(basis, options.smoothing_tol, kSmoothingThreshold,
                                             options.enumeration_cap);
  const double s = sm.bracket.hi;

  BigInt na = n_alpha(n, alpha);
  std::uint64_t count = 0;
  if (override_N) {
    count = *override_N;
  } else {
    if (na > BigInt(options.max_samples))
      throw BudgetExceededError("N_alpha = " + na.str() + " samples; pass an explicit N");
    count = na.convert_to<std::uint64_t>();
  }
  const bool regime = in_theorem_regime(n, alpha);
  if (!regime) warnings.push_back("alpha outside the theorem regime 2/log2(n) <= alpha <= 1/2");
  if (BigInt(count) < na) warnings.push_back("N below N_alpha: theorem guarantee void (empirical mode)");

  GddpParams params;
  params.alpha = alpha;
  params.n = n;
  params.s = s;
  params.N = count;
  params.d = guarantee_distance(n, alpha, s);
  params.theorem_regime = regime;
  params.theorem_guarantee = regime && BigInt(count) >= na;

  LllResult reduced = lll_reduce(basis);
  SampleSet samples;
  if (n <= options.exact_max_dim) {
    samples = sample_exact(basis, GaussianParam(s), count, seed, options.enumeration_cap);
  } else {
    samples = sample_klein(reduced.basis, GaussianParam(s), count, seed, options.klein_quality);
    const MatrixXi ut = reduced.transform.transpose();
    for (LatticeVector& y : samples.samples) y = LatticeVector::from_coeffs(basis, ut * y.coeffs);
    warnings.push_back("Klein sampler used: samples within statistical distance " +
                       std::to_string(*samples.stat_distance_bound) + " of D_{L,s}");
  }
  return Preprocessing(params, basis, std::move(reduced), sm, std::move(samples), std::move(na),
                       std::move(warnings));
}

// ---------------------------------------------------------------- query loop

namespace {

// (q + 1.5 * 2^52) - 1.5 * 2^52 rounds half to even for |q| < 2^51.
constexpr double kRoundShift = 0x1.8p52;

}  // namespace

std::optional<ReduceChoice> reduce_step(const VectorXd& t, const MatrixXd& vectors,
                                        const VectorXd& norms_sq) {
  const Index n = t.size();
  if (vectors.rows() != n && vectors.cols() > 0) throw DimensionMismatchError(n, vectors.rows());
  const double before = t.squaredNorm();
  if (before == 0.0) return std::nullopt;
  const double factor = 1.0 - 1.0 / static_cast<double>(n * n);
  const double threshold = factor * before;
  // The closed-form screen only filters; acceptance uses the recomputed vector.
  const double screen = threshold + 1e-9 * before;
  const double* col = vectors.data();
  const double* tp = t.data();
  for (Index i = 0; i < vectors.cols(); ++i, col += n) {
    const double yy = norms_sq(i);
    double dot = 0.0;
    for (Index k = 0; k < n; ++k) dot += col[k] * tp[k];
    const double q = dot / yy;  // NaN for the zero vector
    const double kd = std::abs(q) >= 0x1p51 ? std::nearbyint(q) : (q + kRoundShift) - kRoundShift;
    // k = 0 gives est == before > screen and NaN compares false, so the common
    // reject path is a single rarely taken branch.
    const double est = before - 2.0 * kd * dot + kd * kd * yy;
    if (!(est <= screen) || kd == 0.0 || yy == 0.0) continue;
    const VectorXd next = t - kd * vectors.col(i);
    const double after = next.squaredNorm();
    if (after <= threshold && after < before)
      return ReduceChoice{i, static_cast<std::int64_t>(kd), after};
  }
  return std::nullopt;
}

std::optional<ReduceChoice> reduce_step(const VectorXd& t, const Preprocessing& prep) {
  if (t.size() != prep.dim()) throw DimensionMismatchError(prep.dim(), t.size());
  return reduce_step(t, prep.embeddings, prep.norms_sq);
}

bool contraction_exists_brute_force(const VectorXd& t, const VectorXd& y) {
  const double yy = y.squaredNorm();
  const double before = t.squaredNorm();
  if (yy == 0.0 || before == 0.0) return false;
  const double n = static_cast<double>(t.size());
  const double threshold = (1.0 - 1.0 / (n * n)) * before;
  const auto bound = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(before / yy)));
  for (std::int64_t k = -bound; k <= bound; ++k) {
    if (k == 0) continue;
    const double after = (t - static_cast<double>(k) * y).squaredNorm();
    if (after <= threshold && after < before) return true;
  }
  return false;
}

std::string to_string(HaltReason reason) {
  return reason == HaltReason::NoImprovingPair ? "no-improving-pair" : "iteration-cap";
}

HaltReason halt_reason_from_string(const std::string& name) {
  if (name == "no-improving-pair") return HaltReason::NoImprovingPair;
  if (name == "iteration-cap") return HaltReason::IterationCap;
  throw std::invalid_argument("unknown halt reason '" + name + "'");
}

std::uint64_t iteration_cap(Index n) {
  const auto m = static_cast<std::uint64_t>(n);
  return 100 * m * m * m;
}

GddSolution query(const Preprocessing& prep, const Target& target) {
  const Index n = prep.dim();
  if (target.dim() != n) throw DimensionMismatchError(n, target.dim());

  QueryTrace trace;
  trace.t = target.t;
  const LatticeVector init = babai_nearest_plane(prep.reduced.basis, target);
  VectorXi z = prep.reduced.transform.transpose() * init.coeffs;
  trace.babai_coeffs = z;
  VectorXd cur = target.t - init.embedding;
  if (cur.norm() < 1e-9 * target.t.norm() + 1e-12) cur.setZero();
  trace.t0 = cur;

  const std::uint64_t cap = iteration_cap(n);
  trace.halt_reason = HaltReason::NoImprovingPair;
  for (;;) {
    if (trace.steps.size() >= cap) {
      trace.halt_reason = HaltReason::IterationCap;
      break;
    }
    const auto choice = reduce_step(cur, prep.embeddings, prep.norms_sq);
    if (!choice) break;
    const double before = cur.squaredNorm();
    const double k = static_cast<double>(choice->k);
    cur = cur - k * prep.embeddings.col(choice->index);
    z += choice->k * prep.vectors.samples[static_cast<std::size_t>(choice->index)].coeffs;
    trace.steps.push_back({choice->index, choice->k, before, cur.squaredNorm()});
  }
  trace.final_t = cur;
  trace.coeffs = z;

  GddSolution sol;
  sol.y = LatticeVector::from_coeffs(prep.basis, z);
  sol.distance = (sol.y.embedding - target.t).norm();
  sol.trace = std::move(trace);
  return sol;
}

VectorXd replay(const Preprocessing& prep, const QueryTrace& trace) {
  VectorXd cur = trace.t0;
  for (const QueryStep& step : trace.steps) {
    if (step.index < 0 || step.index >= prep.embeddings.cols())
      throw std::out_of_range("trace step index outside the preprocessing list");
    cur = cur - static_cast<double>(step.k) * prep.embeddings.col(step.index);
  }
  return cur;
}

// ---------------------------------------------------------------- verification

Verdict verify_solution(const Basis& basis, const Target& target, const LatticeVector& y, double d) {
  const Index n = basis.dim();
  if (target.dim() != n) throw DimensionMismatchError(n, target.dim());
  if (y.embedding.size() != n) throw DimensionMismatchError(n, y.embedding.size());
  Verdict v;
  v.d = d;

  VectorXq point(n);
  for (Index i = 0; i < n; ++i) point(i) = to_rational(y.embedding(i));
  const VectorXq coords = exact_coordinates(basis, point);
  v.membership = y.coeffs.size() == n;
  for (Index i = 0; i < n && v.membership; ++i) {
    if (denominator(coords(i)) == 1) {
      v.membership = numerator(coords(i)) == y.coeffs(i);
      continue;
    }
    // Non-dyadic bases cannot be embedded exactly in double; accept rounding
    // residue only when it matches the recorded integer coefficient.
    const double c = to_double(coords(i));
    v.membership = std::abs(c - static_cast<double>(y.coeffs(i))) <= 1e-9 * std::max(1.0, std::abs(c));
  }

  Rational dist_sq = 0;
  for (Index i = 0; i < n; ++i) {
    const Rational diff = point(i) - to_rational(target.t(i));
    dist_sq += diff * diff;
  }
  v.distance = std::sqrt(to_double(dist_sq));
  v.within_distance = v.distance <= d + 1e-9;
  return v;
}

Verdict verify_solution(const Basis& basis, const Target& target, const GddSolution& sol, double d) {
  return verify_solution(basis, target, sol.y, d);
}

KMultipleReport k_multiple_margin_check(const VectorXd& t, const VectorXd& y, double beta) {
  KMultipleReport r;
  const double n = static_cast<double>(t.size());
  r.bound = 1.0 - 1.0 / (n * n);
  r.hypothesis_value = (t - y).squaredNorm();
  r.applicable = std::abs(t.norm() - 1.0) <= 1e-9 && y.size() == t.size() &&
                 r.hypothesis_value <= 1.0 - 4.0 / (n * n) && beta > 0.0;
  if (!r.applicable) return r;
  const VectorXd scaled = beta * t;
  const double base = scaled.squaredNorm();
  for (auto k = static_cast<std::int64_t>(std::ceil(beta / 2.0)); static_cast<double>(k) <= beta; ++k) {
    const double ratio = (scaled - static_cast<double>(k) * y).squaredNorm() / base;
    ++r.checked;
    r.worst_ratio = std::max(r.worst_ratio, ratio);
    if (ratio > r.bound * (1.0 + 1e-12)) ++r.violations;
  }
  return r;
}

}  // namespace gddp
