#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gddp/lattice.hpp"

namespace gddp {

inline constexpr double kPi = 3.14159265358979323846;

/// Dual-mass level that defines the smoothing parameter: rho_{1/eta}(L*) = 1 + eps
/// with eps = 1/2. Any constant in (1, 2) gives an equivalent notion.
inline constexpr double kSmoothingThreshold = 1.5;

/// Closed interval [lo, hi] enclosing a computed quantity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Width parameter s > 0 of the Gaussian function rho_s(x) = exp(-pi ‖x‖² / s²).
struct GaussianParam {
  double s;

  explicit GaussianParam(double width);
  operator double() const { return s; }
};

inline double rho(double norm_sq, double s) { return std::exp(-kPi * norm_sq / (s * s)); }

/// Banaszczyk: rho_s(L \ r sqrt(n) s B) <= C(r)^n rho_s(L) with
/// C(r) = r sqrt(2 pi e) exp(-pi r²), valid for r >= 1/sqrt(2 pi); shifted
/// cosets pick up an extra factor 2. Returns log(C(r)^n), or +inf when
/// r is outside the valid range.
double log_banaszczyk_tail(Index n, double r);

/// C(r)^n for r = radius / (sqrt(n) s); may exceed 1 for small radii.
double tail_fraction(Index n, double radius, double s);

/// Relative slack covering exp() and summation rounding in window sums.
inline constexpr double kSumRoundingSlack = 2e-15;

/// Neumaier-compensated sum.
double compensated_sum(const VectorXd& v);

/// Smallest radius R = r sqrt(n) s with C(r)^n <= fraction.
double radius_for_tail(Index n, double s, double fraction);

/// Enumerated Gaussian weights around a center, with a certified bound on the
/// mass of (L - center) outside the enumeration ball.
struct GaussianWindow {
  PointSet points;
  VectorXd center;
  double s = 0.0;
  double radius = 0.0;
  VectorXd weights;      // rho_s(y - center) for each enumerated y
  double partial = 0.0;  // sum of weights
  double tail = 0.0;     // upper bound on the omitted mass
};

/// Window centered at the origin; the tail is relative to the window's own mass.
GaussianWindow centered_window(const BallEnumerator& enumerator, double s, double radius);

/// Window around `center`; `lattice_mass_upper` must bound rho_s(L) from above.
GaussianWindow shifted_window(const BallEnumerator& enumerator, double s,
                              const VectorXd& center, double radius,
                              double lattice_mass_upper);

struct MassEstimate {
  double value = 0.0;
  double truncation_radius = 0.0;
  double tail_bound = 0.0;
  double relative_error_bound = 0.0;

  Interval interval() const { return {value - tail_bound, value + tail_bound}; }
};

/// Certified rho_s(L - shift).
MassEstimate gaussian_mass(const Basis& basis, GaussianParam s, const VectorXd& shift,
                           double rel_tol = 1e-12,
                           std::uint64_t cap = kDefaultEnumerationCap);
MassEstimate gaussian_mass(const BallEnumerator& enumerator, GaussianParam s,
                           const VectorXd& shift, double rel_tol = 1e-12);

/// Reduces `shift` modulo L (nearest-plane residual over the reduced basis);
/// rho_s(L - shift) is L-periodic in the shift.
VectorXd reduce_shift(const BallEnumerator& enumerator, const VectorXd& shift);

struct SmoothingEstimate {
  double eta = 0.0;
  Interval bracket;
  double dual_mass_at_eta = 0.0;
  Interval dual_mass_interval;
  int iterations = 0;
};

SmoothingEstimate smoothing_parameter(const Basis& basis, double tol = 1e-11,
                                      double threshold = kSmoothingThreshold,
                                      std::uint64_t cap = kDefaultEnumerationCap);

/// Certified rho_{width}(L) for the dual-mass bisection (exposed for tests).
Interval dual_mass(const Basis& dual, double width, double rel_tol = 1e-13,
                   std::uint64_t cap = kDefaultEnumerationCap);

enum class SamplerKind { Exact, Klein };
std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

struct SampleSet {
  std::vector<LatticeVector> samples;
  double s = 0.0;
  SamplerKind sampler = SamplerKind::Exact;
  std::uint64_t seed = 0;
  std::optional<double> stat_distance_bound;  // Klein only
};

/// Omitted probability allowed by the exact sampler's truncation: 2^-n * 1e-3.
double exact_sampler_tail_fraction(Index n);

/// i.i.d. draws from D_{L,s} truncated to the ball of radius R with
/// rho_s(L \ R B) < 2^-n 10^-3 rho_s(L). Coefficients are over `basis`.
SampleSet sample_exact(const Basis& basis, GaussianParam s, std::size_t count,
                       std::uint64_t seed, std::uint64_t cap = kDefaultEnumerationCap);

/// Exact-sampler support with its normalized probabilities, in canonical order.
struct ExactDistribution {
  PointSet support;
  VectorXd probabilities;
};
ExactDistribution exact_distribution(const BallEnumerator& enumerator, double s);

inline constexpr double kDefaultKleinQuality = 1.0;

/// Minimum width accepted by sample_klein for the given basis.
double klein_min_width(const GramSchmidt& gs, double quality = kDefaultKleinQuality);

/// Randomized nearest-plane sampler over the given (ideally reduced) basis.
SampleSet sample_klein(const Basis& basis, GaussianParam s, std::size_t count,
                       std::uint64_t seed, double quality = kDefaultKleinQuality);

struct BanaszczykReport {
  Interval probability;  // Pr[‖X‖ >= sqrt(n) s]
  double bound = 0.0;    // 2^-n
  bool pass = false;
};

BanaszczykReport banaszczyk_check(const Basis& basis, GaussianParam s,
                                  std::uint64_t cap = kDefaultEnumerationCap);
BanaszczykReport banaszczyk_check(const BallEnumerator& enumerator, GaussianParam s);

}  // namespace gddp
