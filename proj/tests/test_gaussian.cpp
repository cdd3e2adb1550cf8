#include <doctest.h>

#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "gddp/gaussian.hpp"
#include "gddp/rng.hpp"
#include "oracles.hpp"

using namespace gddp;

namespace {

double chi_square_p(const oracle::ChiSquare& c) {
  if (c.dof <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(c.dof), c.statistic));
}

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Counts of samples per support point, plus a count of samples outside it.
std::vector<std::uint64_t> bin(const PointSet& support, const std::vector<LatticeVector>& samples,
                               std::uint64_t& outside) {
  std::map<std::vector<std::int64_t>, std::size_t> index;
  for (Index j = 0; j < support.size(); ++j) {
    const VectorXi c = support.coeffs.col(j);
    index[{c.data(), c.data() + c.size()}] = static_cast<std::size_t>(j);
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(support.size()), 0);
  outside = 0;
  for (const auto& y : samples) {
    auto it = index.find({y.coeffs.data(), y.coeffs.data() + y.coeffs.size()});
    if (it == index.end()) ++outside;
    else ++counts[it->second];
  }
  return counts;
}

}  // namespace

TEST_CASE("GaussianParam validation") {
  CHECK_THROWS_AS(GaussianParam(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianParam(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianParam(std::nan("")), std::invalid_argument);
  CHECK(GaussianParam(2.0).s == 2.0);
}

TEST_CASE("gaussian_mass on Z against the series") {
  const Basis z = Basis::identity(1);
  const MassEstimate m0 = gaussian_mass(z, GaussianParam(1.0), vec({0.0}));
  CHECK(m0.value == doctest::Approx(1.0864348112133080).epsilon(1e-14));
  CHECK(m0.value == doctest::Approx(oracle::mass_z(1.0)).epsilon(1e-14));
  CHECK(m0.tail_bound >= 0.0);
  CHECK(m0.tail_bound <= 1e-12 * m0.value);
  CHECK(m0.relative_error_bound == doctest::Approx(m0.tail_bound / m0.value));
  CHECK(m0.interval().contains(oracle::mass_z(1.0)));

  const MassEstimate mh = gaussian_mass(z, GaussianParam(1.0), vec({0.5}));
  CHECK(mh.value == doctest::Approx(0.9135791381561168).epsilon(1e-14));
  CHECK(mh.tail_bound <= 1e-12 * mh.value);

  for (double s : {0.3, 0.7, 2.0, 5.0})
    for (double c : {0.0, 0.1, 0.37, 0.5, 3.9}) {
      const MassEstimate m = gaussian_mass(z, GaussianParam(s), vec({c}));
      CHECK(std::abs(m.value - oracle::mass_z(s, c)) <= m.tail_bound + 1e-14 * m.value);
    }
  CHECK_THROWS_AS(gaussian_mass(z, GaussianParam(1.0), vec({0.0}), 0.0), std::invalid_argument);
}

TEST_CASE("gaussian_mass factorizes over Z x Z") {
  for (double s : {0.8, 1.0, 1.7})
    for (const auto& c : {vec({0.0, 0.0}), vec({0.5, 0.25}), vec({-0.3, 1.6})}) {
      const MassEstimate m2 = gaussian_mass(Basis::identity(2), GaussianParam(s), c);
      const double prod = oracle::mass_z(s, c(0)) * oracle::mass_z(s, c(1));
      CHECK(m2.value == doctest::Approx(prod).epsilon(1e-12));
    }
}

TEST_CASE("gaussian_mass is periodic in the shift") {
  const Basis b = random_basis(2, BasisStyle::UniformInteger, 4);
  const VectorXd t = vec({0.3, -0.7});
  VectorXi z(2);
  z << 3, -2;
  const double a = gaussian_mass(b, GaussianParam(3.0), t).value;
  const double c = gaussian_mass(b, GaussianParam(3.0), t + b.embed(z)).value;
  CHECK(a == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("smoothing_parameter") {
  SUBCASE("Z against the series-bisection oracle") {
    const SmoothingEstimate e = smoothing_parameter(Basis::identity(1));
    CHECK(e.eta == doctest::Approx(0.6678302020065321).epsilon(1e-10));
    CHECK(std::abs(e.eta - oracle::eta_zn(1)) < 1e-9);
    CHECK(e.bracket.lo <= e.eta);
    CHECK(e.eta <= e.bracket.hi);
    CHECK(e.bracket.width() <= 1e-11 * e.eta);
    CHECK(std::abs(e.dual_mass_at_eta - 1.5) <= 1e-6);
    CHECK(e.dual_mass_interval.lo >= 1.5 - 1e-6);
    CHECK(e.dual_mass_interval.hi <= 1.5 + 1e-6);
  }
  SUBCASE("Z^2 and Z^3") {
    const double e2 = smoothing_parameter(Basis::identity(2)).eta;
    const double e3 = smoothing_parameter(Basis::identity(3)).eta;
    CHECK(e2 == doctest::Approx(0.8344187749416746).epsilon(1e-10));
    CHECK(e3 == doctest::Approx(0.9143561651909417).epsilon(1e-10));
    CHECK(e2 > 0.6678302020065321);
    CHECK(e3 > e2);
  }
  SUBCASE("scaling") {
    for (std::uint64_t seed : {3u, 8u}) {
      const Basis b = random_basis(2, BasisStyle::UniformInteger, seed);
      const double eta = smoothing_parameter(b).eta;
      for (const Rational c : {Rational(1, 3), Rational(2), Rational(10)}) {
        const double ec = smoothing_parameter(b.scaled(c)).eta;
        CHECK(std::abs(ec - to_double(c) * eta) <= 1e-9 * ec);
      }
    }
  }
  SUBCASE("dual mass rho_{1/s}(L*) is strictly decreasing in s") {
    const Basis d = dual_basis(random_basis(3, BasisStyle::UniformInteger, 5));
    double prev = dual_mass(d, 1.0 / 0.2).lo;
    for (double s : {0.4, 0.8, 1.6, 3.2}) {
      const Interval m = dual_mass(d, 1.0 / s);
      CHECK(m.hi < prev);
      prev = m.lo;
    }
  }
}

TEST_CASE("sample_exact") {
  SUBCASE("Pr[X = 0] on Z at s = 1") {
    const std::size_t count = 100000;
    const SampleSet set = sample_exact(Basis::identity(1), GaussianParam(1.0), count, 17);
    CHECK(set.sampler == SamplerKind::Exact);
    CHECK_FALSE(set.stat_distance_bound.has_value());
    std::size_t zeros = 0;
    for (const auto& y : set.samples) zeros += y.coeffs(0) == 0;
    const double p = 1.0 / oracle::mass_z(1.0);
    CHECK(p == doctest::Approx(0.9204417878355910).epsilon(1e-14));
    const double sigma = std::sqrt(count * p * (1 - p));
    CHECK(std::abs(static_cast<double>(zeros) - count * p) <= 3 * sigma);
  }
  SUBCASE("mean of a symmetric lattice vanishes") {
    const Basis b = random_basis(2, BasisStyle::UniformInteger, 6);
    const double s = 2.0 * smoothing_parameter(b).eta;
    const std::size_t count = 50000;
    const SampleSet set = sample_exact(b, GaussianParam(s), count, 3);
    VectorXd mean = VectorXd::Zero(2), second = VectorXd::Zero(2);
    for (const auto& y : set.samples) {
      mean += y.embedding;
      second += y.embedding.cwiseProduct(y.embedding);
    }
    mean /= static_cast<double>(count);
    second /= static_cast<double>(count);
    for (Index i = 0; i < 2; ++i) CHECK(std::abs(mean(i)) <= 4 * std::sqrt(second(i) / count));
  }
  SUBCASE("determinism and lattice membership") {
    const Basis b = random_basis(3, BasisStyle::UniformInteger, 9);
    const SampleSet a = sample_exact(b, GaussianParam(8.0), 500, 123);
    const SampleSet c = sample_exact(b, GaussianParam(8.0), 500, 123);
    REQUIRE(a.samples.size() == 500);
    for (std::size_t i = 0; i < 500; ++i) {
      CHECK(a.samples[i].coeffs == c.samples[i].coeffs);
      CHECK(a.samples[i].embedding == b.embed(a.samples[i].coeffs));
    }
  }
  SUBCASE("chi-square against enumerated probabilities on Z and Z^2") {
    for (Index n : {1, 2}) {
      const Basis b = Basis::identity(n);
      const double s = 1.5;
      const ExactDistribution dist = exact_distribution(BallEnumerator(b), s);
      CHECK(dist.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
      const std::size_t count = 100000;
      const SampleSet set = sample_exact(b, GaussianParam(s), count, 2024 + static_cast<std::uint64_t>(n));
      std::uint64_t outside = 0;
      const auto counts = bin(dist.support, set.samples, outside);
      CHECK(outside == 0);
      const std::vector<double> probs(dist.probabilities.data(),
                                      dist.probabilities.data() + dist.probabilities.size());
      CHECK(chi_square_p(oracle::chi_square(probs, counts, count)) > 0.001);
    }
  }
}

TEST_CASE("sample_klein") {
  SUBCASE("chi-square against the exact sampler distribution on Z^2") {
    const Basis b = Basis::identity(2);
    const double s = 3.0 * std::sqrt(gram_schmidt(b).norms.maxCoeff());
    const std::size_t count = 100000;
    const SampleSet set = sample_klein(b, GaussianParam(s), count, 77);
    REQUIRE(set.stat_distance_bound.has_value());
    CHECK(*set.stat_distance_bound >= 0.0);
    CHECK(*set.stat_distance_bound < 1e-6);
    const ExactDistribution dist = exact_distribution(BallEnumerator(b), s);
    std::uint64_t outside = 0;
    auto counts = bin(dist.support, set.samples, outside);
    std::vector<double> probs(dist.probabilities.data(),
                              dist.probabilities.data() + dist.probabilities.size());
    // Samples outside the truncated support fall into an extra, near-empty bin.
    probs.push_back(0.0);
    counts.push_back(outside);
    CHECK(outside <= 5);
    CHECK(chi_square_p(oracle::chi_square(probs, counts, count)) > 0.001);
  }
  SUBCASE("scaling with matched seeds") {
    const Basis b = lll_reduce(random_basis(3, BasisStyle::UniformInteger, 2)).basis;
    const double s = 1.5 * klein_min_width(gram_schmidt(b));
    const SampleSet a = sample_klein(b, GaussianParam(s), 300, 5);
    const SampleSet c = sample_klein(b.scaled(Rational(4)), GaussianParam(4 * s), 300, 5);
    for (std::size_t i = 0; i < 300; ++i) CHECK(a.samples[i].coeffs == c.samples[i].coeffs);
  }
  SUBCASE("width below the precondition") {
    const Basis b = Basis::identity(2);
    CHECK_THROWS_AS(sample_klein(b, GaussianParam(0.5 * klein_min_width(gram_schmidt(b))), 10, 1),
                    WidthTooSmallError);
  }
  SUBCASE("samples are lattice points") {
    const Basis b = random_basis(4, BasisStyle::UniformInteger, 12);
    const SampleSet set = sample_klein(b, GaussianParam(2 * klein_min_width(gram_schmidt(b))), 200, 8);
    for (const auto& y : set.samples) CHECK(is_lattice_point(b, b.embed_exact(y.coeffs)));
  }
}

TEST_CASE("banaszczyk_check") {
  const BanaszczykReport z = banaszczyk_check(Basis::identity(1), GaussianParam(1.0));
  CHECK(z.probability.contains(0.0795582121644090));
  CHECK(z.probability.width() < 1e-10);
  CHECK(z.bound == 0.5);
  CHECK(z.pass);

  const BanaszczykReport z2 = banaszczyk_check(Basis::identity(2), GaussianParam(1.0));
  CHECK(z2.probability.contains(0.006341327212879471));
  CHECK(z2.probability.hi <= 0.25);
  CHECK(z2.pass);

  const Basis b = random_basis(3, BasisStyle::UniformInteger, 31);
  const double s = smoothing_parameter(b).eta;
  const BanaszczykReport r1 = banaszczyk_check(b, GaussianParam(s));
  const BanaszczykReport r2 = banaszczyk_check(b.scaled(Rational(7, 2)), GaussianParam(3.5 * s));
  CHECK(r1.pass);
  CHECK(r1.probability.mid() == doctest::Approx(r2.probability.mid()).epsilon(1e-9));
}

TEST_CASE("shifted masses stay within the smoothing sandwich") {
  Rng rng(41);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Basis b = random_basis(2, BasisStyle::UniformInteger, seed);
    const double s = smoothing_parameter(b).bracket.hi;
    const BallEnumerator en(b);
    const MassEstimate base = gaussian_mass(en, GaussianParam(s), VectorXd::Zero(2));
    for (int i = 0; i < 10; ++i) {
      const VectorXd t = vec({10 * rng.uniform() - 5, 10 * rng.uniform() - 5});
      const MassEstimate m = gaussian_mass(en, GaussianParam(s), t);
      const double ratio = m.value / base.value;
      CHECK(ratio >= 1.0 / 3.0);
      CHECK(ratio <= 1.0 + 1e-9);
    }
  }
}
