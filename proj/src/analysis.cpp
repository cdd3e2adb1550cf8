#include "gddp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gddp/rng.hpp"

namespace gddp {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::LessEq: return "<=";
    case Relation::Less: return "<";
    case Relation::GreaterEq: return ">=";
    case Relation::Greater: return ">";
  }
  return "?";
}

Relation relation_from_string(const std::string& name) {
  if (name == "<=") return Relation::LessEq;
  if (name == "<") return Relation::Less;
  if (name == ">=") return Relation::GreaterEq;
  if (name == ">") return Relation::Greater;
  throw std::invalid_argument("unknown relation '" + name + "'");
}

BoundReport make_report(std::string check, const Basis& basis, Relation rel, double lhs,
                        Interval lhs_interval, double bound) {
  BoundReport r;
  r.check = std::move(check);
  r.lattice = basis.provenance();
  r.relation = rel;
  r.lhs = lhs;
  r.lhs_interval = lhs_interval;
  r.bound = bound;
  const bool upper = rel == Relation::LessEq || rel == Relation::Less;
  r.margin = upper ? bound - lhs : lhs - bound;
  r.certified_error = upper ? lhs_interval.hi - lhs : lhs - lhs_interval.lo;
  switch (rel) {
    case Relation::LessEq: r.pass = lhs_interval.hi <= bound; break;
    case Relation::Less: r.pass = lhs_interval.hi < bound; break;
    case Relation::GreaterEq: r.pass = lhs_interval.lo >= bound; break;
    case Relation::Greater: r.pass = lhs_interval.lo > bound; break;
  }
  return r;
}

// ---------------------------------------------------------------- lab

GaussianLab::GaussianLab(const Basis& basis, double s, std::uint64_t cap)
    : enumerator_(basis, cap), s_(GaussianParam(s).s) {}

const GaussianWindow& GaussianLab::window(double min_radius, double fraction) {
  const Index n = enumerator_.basis().dim();
  const double radius = std::max(min_radius, radius_for_tail(n, s_, fraction));
  if (!window_ || window_->radius < radius) window_ = centered_window(enumerator_, s_, radius);
  return *window_;
}

Interval GaussianLab::probability(const std::function<bool(const VectorXd&)>& event,
                                  double min_radius, double fraction,
                                  std::optional<double> event_radius) {
  const GaussianWindow& w = window(std::max(min_radius, event_radius.value_or(0.0)), fraction);
  VectorXd hits = VectorXd::Zero(w.weights.size());
  for (Index j = 0; j < w.weights.size(); ++j)
    if (event(w.points.embeddings.col(j))) hits(j) = w.weights(j);
  const double inside = compensated_sum(hits);
  const bool contained = event_radius && *event_radius <= w.radius;
  const double omitted = contained ? 0.0 : w.tail;
  const double lo_slack = 1.0 - kSumRoundingSlack, hi_slack = 1.0 + kSumRoundingSlack;
  Interval p;
  p.lo = inside * lo_slack / ((w.partial + w.tail) * hi_slack);
  p.hi = std::min(1.0, (inside + omitted) * hi_slack / (w.partial * lo_slack));
  return p;
}

const MassEstimate& GaussianLab::lattice_mass() {
  if (!mass_) mass_ = gaussian_mass(enumerator_, GaussianParam(s_), VectorXd::Zero(enumerator_.basis().dim()), 1e-13);
  return *mass_;
}

namespace {

void require_smoothing(const Basis& basis, double s, std::optional<double> eta) {
  const double e = eta ? *eta : smoothing_parameter(basis).bracket.hi;
  if (s < e * (1.0 - 1e-12))
    throw std::invalid_argument("width " + std::to_string(s) + " is below the smoothing parameter " +
                                std::to_string(e));
}

// rho_s(L - shift) / rho_s(L), exactly 1 when the shift is a lattice vector.
std::pair<double, Interval> mass_ratio(GaussianLab& lab, const VectorXd& shift) {
  const VectorXd reduced = reduce_shift(lab.enumerator(), shift);
  if (reduced.isZero(0.0)) return {1.0, {1.0, 1.0}};
  const MassEstimate& base = lab.lattice_mass();
  const MassEstimate m = gaussian_mass(lab.enumerator(), GaussianParam(lab.s()), reduced, 1e-13);
  const double ratio = m.value / base.value;
  return {ratio, {(m.value - m.tail_bound) / (base.value + base.tail_bound),
                  (m.value + m.tail_bound) / (base.value - base.tail_bound)}};
}

void check_unit(const VectorXd& v, Index n) {
  if (v.size() != n) throw DimensionMismatchError(n, v.size());
  if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("direction must be a unit vector");
}

}  // namespace

// ---------------------------------------------------------------- checks

std::vector<BoundReport> smoothing_ratio_check(const Basis& basis, double s,
                                               const std::vector<VectorXd>& shifts,
                                               std::optional<double> eta, std::uint64_t cap) {
  require_smoothing(basis, s, eta);
  GaussianLab lab(basis, s, cap);
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (shifts[i].size() != basis.dim()) throw DimensionMismatchError(basis.dim(), shifts[i].size());
    const auto [ratio, iv] = mass_ratio(lab, shifts[i]);
    for (auto [name, rel, bound] : {std::tuple{"smoothing_ratio_lower", Relation::GreaterEq, 1.0 / 3.0},
                                    std::tuple{"smoothing_ratio_upper", Relation::LessEq, 1.0}}) {
      BoundReport r = make_report(name, basis, rel, ratio, iv, bound);
      r.params["s"] = s;
      r.params["shift_index"] = static_cast<double>(i);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<BoundReport> mgf_sandwich_check(GaussianLab& lab, const VectorXd& v, double beta) {
  const Index n = lab.basis().dim();
  check_unit(v, n);
  const double s = lab.s();

  // Mass-ratio path.
  const auto [ratio, ratio_iv] = mass_ratio(lab, beta * s * v);

  // Expectation path over a window that also covers the shifted ball.
  const double fraction = 1e-14;
  const double reach = std::abs(beta) * s;
  const GaussianWindow& w = lab.window(radius_for_tail(n, s, fraction) + reach, fraction);
  VectorXd terms(w.weights.size());
  for (Index j = 0; j < w.weights.size(); ++j) {
    const double proj = w.points.embeddings.col(j).dot(v);
    terms(j) = w.weights(j) * std::exp(2.0 * kPi * beta * proj / s - kPi * beta * beta);
  }
  const double sum = compensated_sum(terms);
  const double expectation = sum / w.partial;
  const double omitted = 2.0 * tail_fraction(n, w.radius - reach, s) * (w.partial + w.tail);
  const double lo_slack = 1.0 - 4 * kSumRoundingSlack, hi_slack = 1.0 + 4 * kSumRoundingSlack;
  const Interval direct{sum * lo_slack / ((w.partial + w.tail) * hi_slack),
                        (sum + omitted) * hi_slack / (w.partial * lo_slack)};

  const Interval both{std::max(direct.lo, ratio_iv.lo), std::min(direct.hi, ratio_iv.hi)};
  const double gap = std::abs(expectation - ratio) / ratio;

  std::vector<BoundReport> out;
  out.push_back(make_report("mgf_lower", lab.basis(), Relation::GreaterEq, ratio, both, 1.0 / 3.0));
  out.push_back(make_report("mgf_upper", lab.basis(), Relation::LessEq, ratio, both, 1.0));
  out.push_back(make_report("mgf_paths_agree", lab.basis(), Relation::LessEq, gap, {gap, gap}, 1e-9));
  for (BoundReport& r : out) {
    r.params["s"] = s;
    r.params["beta"] = beta;
    r.params["expectation"] = expectation;
    r.params["mass_ratio"] = ratio;
    if (both.lo > both.hi) r.pass = false;  // the two certified intervals disagree
  }
  return out;
}

std::vector<BoundReport> mgf_sandwich_check(const TailCheckSpec& spec) {
  require_smoothing(spec.basis, spec.s, spec.eta);
  GaussianLab lab(spec.basis, spec.s);
  return mgf_sandwich_check(lab, spec.v, spec.beta);
}

std::vector<BoundReport> projection_tail_check(GaussianLab& lab, const VectorXd& v, double r0,
                                               bool with_lower) {
  const Index n = lab.basis().dim();
  check_unit(v, n);
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  const double s = lab.s();
  const double upper = std::exp(-kPi * r0 * r0 / (s * s));
  const double lower = std::exp(-kPi * (r0 / s + 2.0) * (r0 / s + 2.0));

  // The window must reach past the half-space boundary and carry an omitted
  // mass well below the upper bound.
  const double fraction = std::clamp(1e-16 * upper, 1e-290, 1e-13);
  const double reach = r0 + std::sqrt(babai_bound_sq(gram_schmidt(lab.enumerator().reduced().basis))) + s;
  const Interval p = lab.probability([&](const VectorXd& x) { return x.dot(v) >= r0; }, reach, fraction);
  const double value = p.mid();

  std::vector<BoundReport> out;
  out.push_back(make_report("projection_upper", lab.basis(), Relation::LessEq, value, p, upper));
  if (with_lower) out.push_back(make_report("projection_lower", lab.basis(), Relation::Greater, value, p, lower));
  for (BoundReport& r : out) {
    r.params["s"] = s;
    r.params["r0"] = r0;
  }
  return out;
}

std::vector<BoundReport> projection_tail_check(const TailCheckSpec& spec) {
  GaussianLab lab(spec.basis, spec.s);
  bool smooth = true;
  try {
    require_smoothing(spec.basis, spec.s, spec.eta);
  } catch (const std::invalid_argument&) {
    smooth = false;
  }
  return projection_tail_check(lab, spec.v, spec.r0, smooth);
}

BoundReport get_shorter_check(GaussianLab& lab, const VectorXd& v, double r) {
  const Index n = lab.basis().dim();
  check_unit(v, n);
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0, 1)");
  const double s = lab.s();
  const double nd = static_cast<double>(n);
  const double e = r / s + nd * s + 4.0;
  const double bound = std::exp(-kPi * e * e / 4.0) - std::ldexp(1.0, -static_cast<int>(n));
  const double limit = 1.0 - r;
  const Interval p = lab.probability([&](const VectorXd& x) { return (v - x).squaredNorm() <= limit; },
                                     0.0, 1e-13, 1.0 + std::sqrt(limit));
  BoundReport rep = make_report("get_shorter", lab.basis(), Relation::Greater, p.mid(), p, bound);
  rep.params["s"] = s;
  rep.params["r"] = r;
  rep.params["vacuous"] = bound <= 0.0 ? 1.0 : 0.0;
  return rep;
}

BoundReport get_shorter_check(const TailCheckSpec& spec) {
  require_smoothing(spec.basis, spec.s, spec.eta);
  GaussianLab lab(spec.basis, spec.s);
  return get_shorter_check(lab, spec.v, spec.r);
}

BoundReport banaszczyk_report(GaussianLab& lab) {
  const BanaszczykReport b = banaszczyk_check(lab.enumerator(), GaussianParam(lab.s()));
  BoundReport r = make_report("banaszczyk", lab.basis(), Relation::LessEq, b.probability.mid(),
                              b.probability, b.bound);
  r.params["s"] = lab.s();
  return r;
}

// ---------------------------------------------------------------- eps-nets

MatrixXd sphere_probes(Index n, double resolution, std::uint64_t cap) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (n == 1) return (MatrixXd(1, 2) << 1.0, -1.0).finished();
  if (!(resolution > 0.0)) throw std::invalid_argument("probe resolution must be positive");
  // Radial projection from the cube surface is 1-Lipschitz, so a face grid
  // of spacing h covers the sphere within h sqrt(n-1) / 2.
  const double h = 2.0 * resolution / std::sqrt(static_cast<double>(n - 1));
  const auto half = static_cast<std::int64_t>(std::ceil(1.0 / h));
  const std::int64_t m = 2 * half;  // even, so face centers are grid points
  const double per_face = std::pow(static_cast<double>(m + 1), static_cast<double>(n - 1));
  const double total = 2.0 * static_cast<double>(n) * per_face;
  if (total > static_cast<double>(cap))
    throw BudgetExceededError("sphere probe set of " + std::to_string(static_cast<std::uint64_t>(total)) +
                              " points exceeds the cap of " + std::to_string(cap));

  MatrixXd probes(n, static_cast<Index>(total));
  Index col = 0;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n - 1));
  for (Index axis = 0; axis < n; ++axis) {
    for (double sign : {1.0, -1.0}) {
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        VectorXd p(n);
        Index k = 0;
        for (Index i = 0; i < n; ++i) {
          if (i == axis) {
            p(i) = sign;
          } else {
            p(i) = -1.0 + 2.0 * static_cast<double>(idx[static_cast<std::size_t>(k++)]) / static_cast<double>(m);
          }
        }
        probes.col(col++) = p / p.norm();
        std::size_t j = 0;
        while (j < idx.size() && idx[j] == m) idx[j++] = 0;
        if (j == idx.size()) break;
        ++idx[j];
      }
    }
  }
  return probes;
}

namespace {

// Uniform bucketing of the probe cube [-1, 1]^n for radius queries.
class ProbeGrid {
 public:
  ProbeGrid(const MatrixXd& probes, double cell)
      : n_(probes.rows()), cell_(cell), side_(static_cast<std::int64_t>(std::ceil(2.0 / cell)) + 1) {
    std::int64_t total = 1;
    for (Index i = 0; i < n_; ++i) total *= side_;
    buckets_.resize(static_cast<std::size_t>(total));
    for (Index k = 0; k < probes.cols(); ++k) buckets_[static_cast<std::size_t>(key(probes.col(k)))].push_back(k);
  }

  /// Calls f(k) for every probe k that may lie within `radius` of x.
  template <class F>
  void for_each_near(const VectorXd& x, double radius, F&& f) const {
    std::vector<std::int64_t> lo(static_cast<std::size_t>(n_)), hi(lo.size()), at(lo.size());
    for (Index i = 0; i < n_; ++i) {
      lo[static_cast<std::size_t>(i)] = coord(x(i) - radius);
      hi[static_cast<std::size_t>(i)] = coord(x(i) + radius);
    }
    at = lo;
    for (;;) {
      std::int64_t k = 0;
      for (Index i = n_ - 1; i >= 0; --i) k = k * side_ + at[static_cast<std::size_t>(i)];
      for (Index p : buckets_[static_cast<std::size_t>(k)]) f(p);
      std::size_t i = 0;
      while (i < at.size() && at[i] == hi[i]) {
        at[i] = lo[i];
        ++i;
      }
      if (i == at.size()) break;
      ++at[i];
    }
  }

 private:
  std::int64_t coord(double v) const {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((v + 1.0) / cell_)), 0, side_ - 1);
  }
  std::int64_t key(const VectorXd& x) const {
    std::int64_t k = 0;
    for (Index i = n_ - 1; i >= 0; --i) k = k * side_ + coord(x(i));
    return k;
  }

  Index n_;
  double cell_;
  std::int64_t side_;
  std::vector<std::vector<Index>> buckets_;
};

}  // namespace

double covering_distance(const MatrixXd& net, const MatrixXd& probes) {
  double worst = 0.0;
  for (Index k = 0; k < probes.cols(); ++k)
    worst = std::max(worst, (net.colwise() - probes.col(k)).colwise().norm().minCoeff());
  return worst;
}

EpsNet build_eps_net(Index n, double eps, double probe_resolution, std::uint64_t cap) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const MatrixXd probes = sphere_probes(n, probe_resolution, cap);

  EpsNet net;
  net.n = n;
  net.eps = eps;
  net.probe_resolution = n == 1 ? 0.0 : probe_resolution;
  net.probe_count = static_cast<std::size_t>(probes.cols());

  Index start = 0;
  probes.row(0).maxCoeff(&start);
  const ProbeGrid grid(probes, std::max(eps, 1e-3));
  VectorXd nearest = (probes.colwise() - probes.col(start)).colwise().norm().transpose();
  // Max-heap on (distance, -index) with lazy deletion: ties go to the lowest index.
  using Entry = std::pair<double, Index>;
  auto later = [](const Entry& a, const Entry& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
  for (Index k = 0; k < probes.cols(); ++k) heap.push({nearest(k), k});
  std::vector<Index> chosen{start};
  for (;;) {
    while (heap.top().first != nearest(heap.top().second)) heap.pop();
    const auto [dist, far] = heap.top();
    if (dist <= eps) break;
    chosen.push_back(far);
    grid.for_each_near(probes.col(far), dist, [&](Index k) {
      const double d = (probes.col(k) - probes.col(far)).norm();
      if (d < nearest(k)) {
        nearest(k) = d;
        heap.push({d, k});
      }
    });
  }
  net.points.resize(n, static_cast<Index>(chosen.size()));
  for (std::size_t i = 0; i < chosen.size(); ++i) net.points.col(static_cast<Index>(i)) = probes.col(chosen[i]);

  net.worst_probe_distance = nearest.maxCoeff();
  net.covering_certified = net.worst_probe_distance <= eps;

  Rational base = 1 + 2 / to_rational(eps);
  Rational power = 1;
  for (Index i = 0; i < n; ++i) power *= base;
  net.size_bound = numerator(power) / denominator(power);
  if (BigInt(net.size()) > net.size_bound) throw std::logic_error("eps-net exceeds the packing bound");
  return net;
}

// ---------------------------------------------------------------- union bound

UnionBoundReport union_bound_experiment(const Basis& basis, double alpha, std::uint64_t seed,
                                        std::uint64_t simulated_N, std::uint64_t cap,
                                        std::uint64_t probe_cap) {
  const Index n = basis.dim();
  if (n > 3) throw std::invalid_argument("union-bound experiment is limited to n <= 3");
  UnionBoundReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.seed = seed;
  rep.simulated_N = simulated_N;
  const double nd = static_cast<double>(n);
  rep.s = smoothing_parameter(basis, 1e-11, kSmoothingThreshold, cap).bracket.hi;
  rep.d = guarantee_distance(n, alpha, rep.s);
  rep.net_eps = 1.0 / (nd * nd * nd);
  const EpsNet net = build_eps_net(n, rep.net_eps, rep.net_eps / 10.0, probe_cap);
  rep.net_size = net.size();
  rep.threshold = 1.0 - 5.0 / (nd * nd);

  // ‖v_j - X/d‖² <= threshold  <=>  ‖d v_j - X‖² <= d² threshold.
  GaussianLab lab(basis, rep.s, cap);
  const double limit = rep.d * rep.d * rep.threshold;
  rep.p.reserve(static_cast<std::size_t>(net.size()));
  for (Index j = 0; j < net.size(); ++j) {
    if (rep.threshold < 0.0) {
      rep.p.push_back({0.0, 0.0});
      continue;
    }
    const VectorXd c = rep.d * net.points.col(j);
    rep.p.push_back(lab.probability([&](const VectorXd& x) { return (c - x).squaredNorm() <= limit; },
                                    0.0, 1e-13, rep.d * (1.0 + std::sqrt(rep.threshold))));
  }
  rep.min_p = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const Interval& p : rep.p) {
    rep.min_p.lo = std::min(rep.min_p.lo, p.lo);
    rep.min_p.hi = std::min(rep.min_p.hi, p.hi);
  }

  const double root = std::pow(nd, 0.5 - alpha) + 4.0;
  rep.chain_bound = std::exp(-root * root);
  rep.chain_bound_n_alpha = nd * nd / n_alpha(n, alpha).convert_to<double>();
  rep.chain = make_report("union_bound_chain", basis, Relation::GreaterEq, rep.min_p.mid(), rep.min_p,
                          rep.chain_bound);
  rep.chain.params["alpha"] = alpha;
  rep.chain.params["n"] = nd;
  rep.chain.params["net_size"] = static_cast<double>(net.size());

  const double p = rep.min_p.lo;
  const double target = std::log(std::ldexp(1.0, -static_cast<int>(n)) / static_cast<double>(net.size()));
  if (p >= 1.0) {
    rep.needed_N = 1.0;
    rep.needed_N_verified = true;
  } else if (p > 0.0) {
    const double per = std::log1p(-p);
    const double N = std::floor(target / per) + 1.0;
    rep.needed_N = N;
    rep.needed_N_verified = N * per < target;
  }
  rep.failure_probability = p > 0.0 ? std::exp(static_cast<double>(simulated_N) * std::log1p(-p)) : 1.0;

  // Empirical counterpart: net points that none of the simulated samples reach.
  if (simulated_N > 0) {
    const SampleSet draws = sample_exact(basis, GaussianParam(rep.s), simulated_N, seed, cap);
    for (Index j = 0; j < net.size(); ++j) {
      const VectorXd c = rep.d * net.points.col(j);
      const bool hit = rep.threshold >= 0.0 &&
                       std::any_of(draws.samples.begin(), draws.samples.end(), [&](const LatticeVector& y) {
                         return (c - y.embedding).squaredNorm() <= limit;
                       });
      rep.empirical_misses += hit ? 0 : 1;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- corpus

std::vector<Basis> corpus_bases(const CorpusOptions& options) {
  std::vector<Basis> out;
  RandomBasisOptions ro;
  ro.bound = options.entry_bound;
  for (Index n : options.dims)
    for (int i = 0; i < options.lattices_per_dim; ++i)
      out.push_back(random_basis(n, BasisStyle::UniformInteger,
                                 derive_seed(options.seed, static_cast<std::uint64_t>(100 * n + i)), ro));
  return out;
}

std::size_t CorpusResult::failures() const {
  return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(),
                                                [](const BoundReport& r) { return !r.pass; }));
}

namespace {

bool selected(const std::vector<std::string>& checks, const std::string& name) {
  if (checks.empty()) return true;
  return std::any_of(checks.begin(), checks.end(),
                     [&](const std::string& c) { return name.rfind(c, 0) == 0; });
}

}  // namespace

CorpusResult run_corpus(const CorpusOptions& options, const std::vector<std::string>& checks) {
  CorpusResult result;
  const std::vector<Basis> bases = corpus_bases(options);
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const Basis& basis = bases[b];
    const Index n = basis.dim();
    const double eta = smoothing_parameter(basis, 1e-11, kSmoothingThreshold, options.cap).bracket.hi;

    Rng rng(derive_seed(options.seed, 1'000'000 + b));
    std::vector<VectorXd> shifts, dirs;
    for (int i = 0; i < options.shifts; ++i) {
      VectorXd u(n);
      for (Index k = 0; k < n; ++k) u(k) = rng.uniform();
      shifts.push_back(basis.rows_double().transpose() * u);
    }
    for (int i = 0; i < options.directions; ++i) {
      VectorXd v(n);
      for (Index k = 0; k < n; ++k) v(k) = rng.normal();
      dirs.push_back(v / v.norm());
    }

    auto tag = [&](std::vector<BoundReport> reps, double factor, std::map<std::string, double> extra) {
      for (BoundReport& r : reps) {
        r.params["n"] = static_cast<double>(n);
        r.params["basis_index"] = static_cast<double>(b);
        r.params["eta"] = eta;
        r.params["s_factor"] = factor;
        for (const auto& [k, v] : extra) r.params[k] = v;
        result.reports.push_back(std::move(r));
      }
    };

    for (double factor : options.s_factors) {
      const double s = factor * eta;
      if (selected(checks, "smoothing_ratio"))
        tag(smoothing_ratio_check(basis, s, shifts, eta, options.cap), factor, {});
      GaussianLab lab(basis, s, options.cap);
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const std::map<std::string, double> at{{"dir_index", static_cast<double>(d)}};
        if (selected(checks, "projection"))
          for (double r0 : options.r0) tag(projection_tail_check(lab, dirs[d], r0, true), factor, at);
        if (selected(checks, "mgf"))
          for (double beta : options.betas) tag(mgf_sandwich_check(lab, dirs[d], beta), factor, at);
        if (selected(checks, "get_shorter"))
          for (double r : options.rs) tag({get_shorter_check(lab, dirs[d], r)}, factor, at);
      }
    }
    if (selected(checks, "projection")) {
      GaussianLab low(basis, options.below_smoothing_factor * eta, options.cap);
      for (std::size_t d = 0; d < dirs.size(); ++d)
        for (double r0 : options.r0)
          tag(projection_tail_check(low, dirs[d], r0, false), options.below_smoothing_factor,
              {{"dir_index", static_cast<double>(d)}});
    }
    if (selected(checks, "banaszczyk"))
      for (double factor : options.banaszczyk_factors) {
        GaussianLab lab(basis, factor * eta, options.cap);
        tag({banaszczyk_report(lab)}, factor, {});
      }
  }
  return result;
}

}  // namespace gddp
