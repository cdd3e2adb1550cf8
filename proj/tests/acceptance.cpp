// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unistd.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "gddp/analysis.hpp"
#include "gddp/cli.hpp"
#include "gddp/io.hpp"
#include "gddp/rng.hpp"
#include "oracles.hpp"

using namespace gddp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void line(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d: %s  %s | %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[2048];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Tally {
  std::size_t total = 0, failed = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per;
  double worst_margin = INFINITY;

  void add(const BoundReport& r) {
    ++total;
    auto& [t, f] = per[r.check];
    ++t;
    if (!r.pass) {
      ++failed;
      ++f;
    }
    worst_margin = std::min(worst_margin, r.margin);
  }
  std::string summary() const {
    std::string s;
    for (const auto& [name, tf] : per) s += fmt("%s %zu/%zu ", name.c_str(), tf.first - tf.second, tf.first);
    return s;
  }
};

Tally corpus(const std::vector<std::string>& checks, double* secs) {
  const auto t0 = Clock::now();
  const CorpusResult r = run_corpus(CorpusOptions{}, checks);
  *secs = seconds_since(t0);
  Tally t;
  for (const BoundReport& rep : r.reports) t.add(rep);
  return t;
}

// ---------------------------------------------------------------- 1-4

void criterion_1() {
  double secs = 0;
  const Tally t = corpus({"smoothing_ratio"}, &secs);
  line(1, t.total > 0 && t.failed == 0 && secs < 120, "smoothing ratio in [1/3, 1] over the corpus",
       fmt("%zu reports, %zu violations, %.1f s (limit 120)", t.total, t.failed, secs));
}

void criterion_2() {
  double secs = 0;
  const auto t0 = Clock::now();
  const CorpusResult r = run_corpus(CorpusOptions{}, {"projection", "mgf"});
  secs = seconds_since(t0);
  Tally t;
  std::size_t below = 0, below_failed = 0;
  for (const BoundReport& rep : r.reports) {
    t.add(rep);
    const auto f = rep.params.find("s_factor");
    if (f != rep.params.end() && f->second < 1.0) {
      ++below;
      below_failed += !rep.pass;
    }
  }
  line(2, t.total > 0 && t.failed == 0 && below > 0 && secs < 300,
       "projection tail bounds and mgf sandwich over the corpus",
       fmt("%zu reports, %zu violations (%s), below-smoothing upper checks %zu with %zu violations, %.1f s "
           "(limit 300)",
           t.total, t.failed, t.summary().c_str(), below, below_failed, secs));
}

void criterion_3() {
  double secs = 0;
  const auto t0 = Clock::now();
  const CorpusResult r = run_corpus(CorpusOptions{}, {"get_shorter"});
  secs = seconds_since(t0);
  std::size_t total = 0, failed = 0, positive = 0, positive_failed = 0;
  for (const BoundReport& rep : r.reports) {
    ++total;
    failed += !rep.pass;
    if (rep.bound > 0.0) {
      ++positive;
      positive_failed += !rep.pass;
    }
  }
  line(3, total > 0 && failed == 0, "short-vector probability bound over r in {0.05..0.5}",
       fmt("%zu reports, %zu with a positive bound, %zu violations where positive, %zu total violations, %.1f s%s",
           total, positive, positive_failed, failed, secs,
           positive == 0 ? " (vacuous: the bound is negative at every corpus point)" : ""));
}

void criterion_4() {
  double secs = 0;
  const Tally t = corpus({"banaszczyk"}, &secs);
  line(4, t.total == 120 && t.failed == 0, "Pr[|X| >= sqrt(n) s] <= 2^-n at s in {eta, 2 eta}",
       fmt("%zu reports, %zu violations, smallest margin %.3g, %.1f s", t.total, t.failed, t.worst_margin, secs));
}

// ---------------------------------------------------------------- 5

void criterion_5() {
  const auto bases = corpus_bases();
  double worst_mass = 0.0, worst_scale = 0.0;
  for (const Basis& b : bases) {
    const SmoothingEstimate e = smoothing_parameter(b);
    const Interval m = dual_mass(dual_basis(b), 1.0 / e.eta);
    worst_mass = std::max({worst_mass, std::abs(m.lo - 1.5), std::abs(m.hi - 1.5)});
    for (const Rational& c : {Rational(1, 3), Rational(2), Rational(10)}) {
      const double scaled = smoothing_parameter(b.scaled(c)).eta;
      const double expect = to_double(c) * e.eta;
      worst_scale = std::max(worst_scale, std::abs(scaled - expect) / expect);
    }
  }
  const double eta_z = smoothing_parameter(Basis::identity(1)).eta;
  const double oracle = oracle::eta_zn(1);
  const bool pass = worst_mass <= 1e-6 && worst_scale <= 1e-9 && std::abs(eta_z - oracle) <= 1e-3 &&
                    std::abs(eta_z - 0.668) <= 1e-3;
  line(5, pass, "smoothing estimator",
       fmt("%zu lattices: max |rho_{1/eta}(L*) - 1.5| = %.2e (limit 1e-6), max scaling error %.2e (limit 1e-9), "
           "eta(Z) = %.9f vs series oracle %.9f",
           bases.size(), worst_mass, worst_scale, eta_z, oracle));
}

// ---------------------------------------------------------------- 6

double chi_p(const oracle::ChiSquare& c) {
  if (c.dof <= 0) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(c.dof), c.statistic));
}

/// Goodness of fit of samples on Z^n against the product series probabilities.
double fit_zn(const SampleSet& set, double s, int n) {
  std::map<std::vector<std::int64_t>, std::uint64_t> counts;
  for (const LatticeVector& y : set.samples) ++counts[{y.coeffs.data(), y.coeffs.data() + n}];
  const double z = oracle::mass_z(s);
  const int box = static_cast<int>(std::ceil(8 * s));
  std::vector<double> probs;
  std::vector<std::uint64_t> obs;
  std::vector<std::int64_t> k(static_cast<std::size_t>(n), -box);
  for (;;) {
    double p = 1.0;
    for (auto v : k) p *= std::exp(-oracle::kPi * double(v * v) / (s * s)) / z;
    probs.push_back(p);
    auto it = counts.find(k);
    obs.push_back(it == counts.end() ? 0 : it->second);
    std::size_t i = 0;
    while (i < k.size() && k[i] == box) k[i++] = -box;
    if (i == k.size()) break;
    ++k[i];
  }
  return chi_p(oracle::chi_square(probs, obs, set.samples.size()));
}

/// Two-sample homogeneity test for equally sized sample sets.
double homogeneity(const SampleSet& a, const SampleSet& b) {
  std::map<std::vector<std::int64_t>, std::pair<double, double>> bins;
  for (const LatticeVector& y : a.samples)
    bins[{y.coeffs.data(), y.coeffs.data() + y.coeffs.size()}].first += 1;
  for (const LatticeVector& y : b.samples)
    bins[{y.coeffs.data(), y.coeffs.data() + y.coeffs.size()}].second += 1;
  double stat = 0.0, pa = 0.0, pb = 0.0;
  int k = 0;
  auto add = [&](double x, double y) {
    const double e = 0.5 * (x + y);
    stat += (x - e) * (x - e) / e + (y - e) * (y - e) / e;
    ++k;
  };
  for (const auto& [key, c] : bins) {
    if (c.first + c.second >= 10) {
      add(c.first, c.second);
    } else {
      pa += c.first;
      pb += c.second;
    }
  }
  if (pa + pb >= 10) add(pa, pb);
  return chi_p({stat, k - 1});
}

void criterion_6() {
  const std::size_t count = 100000;
  const double s1 = smoothing_parameter(Basis::identity(1)).bracket.hi;
  const double s2 = smoothing_parameter(Basis::identity(2)).bracket.hi;
  const double p_z = fit_zn(sample_exact(Basis::identity(1), GaussianParam(s1), count, 601), s1, 1);
  const double p_z2 = fit_zn(sample_exact(Basis::identity(2), GaussianParam(s2), count, 602), s2, 2);
  const Basis z2 = Basis::identity(2);
  const double s = 3.0 * std::sqrt(gram_schmidt(z2).norms.maxCoeff());
  const SampleSet klein = sample_klein(z2, GaussianParam(s), count, 603);
  const SampleSet exact = sample_exact(z2, GaussianParam(s), count, 604);
  const double p_two = homogeneity(klein, exact);
  const double p_klein_fit = fit_zn(klein, s, 2);
  const bool pass = p_z > 1e-3 && p_z2 > 1e-3 && p_two > 1e-3 && p_klein_fit > 1e-3;
  line(6, pass, "sampler fidelity at 1e5 samples",
       fmt("exact on Z p = %.3f, exact on Z^2 p = %.3f, Klein vs exact on Z^2 at s = 3 p = %.3f "
           "(Klein vs series p = %.3f), limit 0.001",
           p_z, p_z2, p_two, p_klein_fit));
}

// ---------------------------------------------------------------- 7

void criterion_7() {
  const auto t0 = Clock::now();
  std::size_t lattices = 0, queries = 0, steps = 0;
  std::size_t bad_contraction = 0, bad_cap = 0, bad_membership = 0, bad_babai = 0, bad_monotone = 0;
  for (Index n = 2; n <= 8; ++n) {
    for (int i = 0; i < 20; ++i) {
      const std::uint64_t seed = derive_seed(7007, 100 * static_cast<std::uint64_t>(n) + i);
      const Basis b = random_basis(n, BasisStyle::UniformInteger, seed);
      const Preprocessing full = preprocess(b, 0.5, 10000, derive_seed(seed, 1));
      const Preprocessing small = cli::restrict_to(full, 0.5, 100);
      const double babai_sq = babai_bound_sq(gram_schmidt(full.reduced.basis));
      const auto targets = cli::cell_targets(full.reduced, 100, derive_seed(seed, 2));
      const double factor = 1.0 - 1.0 / static_cast<double>(n * n);
      std::vector<double> d_small, d_full;
      for (const Target& t : targets) {
        for (const Preprocessing* p : {&small, &full}) {
          const GddSolution sol = query(*p, t);
          ++queries;
          steps += sol.trace.steps.size();
          for (const QueryStep& st : sol.trace.steps)
            if (!(st.norm_sq_after <= factor * st.norm_sq_before)) ++bad_contraction;
          if (sol.trace.steps.size() > iteration_cap(n)) ++bad_cap;
          if (!verify_solution(b, t, sol, INFINITY).membership) ++bad_membership;
          const double t0_norm = sol.trace.t0.norm();
          if (sol.distance * sol.distance > babai_sq * (1 + 1e-12) || sol.distance > t0_norm * (1 + 1e-12))
            ++bad_babai;
          (p == &small ? d_small : d_full).push_back(sol.distance);
        }
      }
      if (cli::median(d_full) > cli::median(d_small)) ++bad_monotone;
      ++lattices;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = bad_contraction + bad_cap + bad_membership + bad_babai + bad_monotone == 0 && secs < 600;
  line(7, pass, "query contract, 20 lattices per n in 2..8, N in {1e2, 1e4}, 100 targets",
       fmt("%zu lattices, %zu queries, %zu steps; violations: contraction %zu, cap %zu, membership %zu, "
           "Babai bound %zu, median monotonicity %zu; %.1f s (limit 600)",
           lattices, queries, steps, bad_contraction, bad_cap, bad_membership, bad_babai, bad_monotone, secs));
}

// ---------------------------------------------------------------- 8

void criterion_8() {
  Rng rng(808);
  int mismatches = 0, accepts = 0;
  for (int i = 0; i < 1000; ++i) {
    VectorXd t(2), y(2);
    t << rng.normal(), rng.normal();
    y << rng.normal(), rng.normal();
    y *= std::exp(3.0 * rng.uniform() - 2.0) * t.norm() / y.norm();
    MatrixXd ys = y;
    VectorXd nn = VectorXd::Constant(1, y.squaredNorm());
    const bool fast = reduce_step(t, ys, nn).has_value();
    accepts += fast;
    if (fast != contraction_exists_brute_force(t, y)) ++mismatches;
  }
  int applicable = 0, violations = 0, checked = 0;
  for (int n : {5, 10, 20}) {
    for (int i = 0; i < 334; ++i) {
      VectorXd t(n), e(n);
      for (int k = 0; k < n; ++k) {
        t(k) = rng.normal();
        e(k) = rng.normal();
      }
      t.normalize();
      e.normalize();
      const double r = std::sqrt((1.0 - 4.0 / (n * n)) * rng.uniform());
      const VectorXd y = t + r * e;
      const double beta = 1.0 + 19.0 * rng.uniform();
      const KMultipleReport rep = k_multiple_margin_check(t, y, beta);
      applicable += rep.applicable;
      violations += rep.violations;
      checked += rep.checked;
    }
  }
  line(8, mismatches == 0 && violations == 0 && applicable == 1002,
       "reduce_step agrees with brute force over k; k-multiple contraction",
       fmt("1000 pairs at n = 2 (%d accepted), %d mismatches; 1002 triples, %d applicable, %d k values checked, "
           "%d violations",
           accepts, mismatches, applicable, checked, violations));
}

// ---------------------------------------------------------------- 9

void criterion_9() {
  const auto t0 = Clock::now();
  const UnionBoundReport r = union_bound_experiment(Basis::identity(2).scaled(Rational(3)), 0.5, 909);
  const double secs = seconds_since(t0);
  const bool pass = r.chain.pass && r.needed_N.has_value() && secs < 180;
  const UnionBoundReport r3 = union_bound_experiment(Basis::identity(3).scaled(Rational(3)), 0.5, 909, 200);
  line(9, pass, "net union bound on 3 Z^2 at alpha = 1/2",
       fmt("net size %ld, success threshold 1 - 5/n^2 = %.3f, min p in [%.3g, %.3g], chain bound %.3g, "
           "needed N %s, %.1f s; at n = 2 the success ball has negative squared radius so p = 0 and N is infinite "
           "(for contrast n = 3: net size %ld, min p %.3g, chain %s, needed N %s)",
           static_cast<long>(r.net_size), r.threshold, r.min_p.lo, r.min_p.hi, r.chain_bound,
           r.needed_N ? fmt("%.6g", *r.needed_N).c_str() : "infinite", secs, static_cast<long>(r3.net_size),
           r3.min_p.lo, r3.chain.pass ? "holds" : "fails", r3.needed_N ? fmt("%.6g", *r3.needed_N).c_str() : "infinite"));
}

// ---------------------------------------------------------------- 10

io::json strip_timing(io::json j) {
  for (auto& row : j["table"]["rows"]) {
    row.erase("wall_time");
    row.erase("seconds_per_scan");
  }
  return j;
}

bool cli_reproducible(std::string* detail) {
  const fs::path dir = fs::temp_directory_path() / ("gddp_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto f = [&](const char* name) { return (dir / name).string(); };
  io::write_text(f("t.json"), io::dump({{"n", 5}, {"t", {3.1, -0.7, 12.25, 4.0, -8.5}}}));
  const std::vector<std::vector<std::string>> commands = {
      {"gen", "--n", "5", "--seed", "11", "--out", f("b.json")},
      {"eta", "--basis", f("b.json"), "--out", f("e.json")},
      {"preprocess", "--basis", f("b.json"), "--alpha", "0.5", "--N", "2000", "--seed", "12", "--out", f("p.json")},
      {"query", "--prep", f("p.json"), "--target", f("t.json"), "--trace", f("tr.json"), "--out", f("s.json")},
      {"verify", "--prep", f("p.json"), "--target", f("t.json"), "--solution", f("s.json"), "--out", f("v.json")},
      {"bench", "--basis", f("b.json"), "--alphas", "0.3,0.5", "--N", "0,100,1000", "--targets", "20", "--seed", "13",
       "--json", "--out", f("bench.json")},
      {"lemmas", "--corpus", "smoke", "--out", f("l.json")},
      {"union-bound", "--n", "2", "--seed", "14", "--simulate", "100", "--out", f("u.json")},
  };
  const char* files[] = {"b.json", "e.json", "p.json", "tr.json", "s.json", "v.json", "bench.json", "l.json", "u.json"};
  std::map<std::string, std::string> first;
  bool same = true;
  int artifacts = 0;
  for (int round = 0; round < 2; ++round) {
    for (const auto& c : commands) cli::run(c);
    for (const char* name : files) {
      std::string text = io::read_file(f(name));
      if (std::string(name) == "bench.json") text = io::dump(strip_timing(io::json::parse(text)));
      if (round == 0) {
        first[name] = text;
        ++artifacts;
      } else if (first[name] != text) {
        same = false;
        *detail += std::string(" differs:") + name;
      }
    }
  }
  fs::remove_all(dir);
  *detail = fmt("%d artifacts byte-identical across two runs: %s%s", artifacts, same ? "yes" : "no",
                detail->c_str());
  return same;
}

bool timing_linear(std::string* detail) {
  const Basis b = random_basis(6, BasisStyle::UniformInteger, 1010);
  const Preprocessing full = preprocess(b, 0.5, 10000, 1011);
  const auto targets = cli::cell_targets(full.reduced, 1000, 1012);
  const std::uint64_t Ns[] = {0, 100, 1000, 10000};
  std::map<std::uint64_t, Preprocessing> preps;
  for (std::uint64_t N : Ns) preps.emplace(N, cli::restrict_to(full, 0.5, N));
  std::map<std::uint64_t, double> total;
  std::map<std::uint64_t, std::uint64_t> examined;
  for (std::uint64_t N : Ns) total[N] = INFINITY;
  // Round-robin over N so slow drift of the machine affects every N alike.
  for (int rep = 0; rep < 25; ++rep) {
    for (std::uint64_t N : Ns) {
      const Preprocessing& p = preps.at(N);
      std::uint64_t work = 0;
      const auto t0 = Clock::now();
      for (const Target& t : targets) {
        const GddSolution sol = query(p, t);
        for (const QueryStep& st : sol.trace.steps) work += static_cast<std::uint64_t>(st.index) + 1;
        work += N;
      }
      total[N] = std::min(total[N], seconds_since(t0));
      examined[N] = work;
    }
  }
  // Query time beyond the N = 0 (Babai only) baseline, per unit of N.
  double lo = INFINITY, hi = 0.0;
  std::string per;
  for (std::uint64_t N : {100, 1000, 10000}) {
    const double extra = total[N] - total[0];
    const double c = extra / static_cast<double>(N);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    per += fmt("N=%llu: %.3g ms, %.3g us per unit N, %.3g ns per examined sample; ",
               static_cast<unsigned long long>(N), 1e3 * total[N], 1e6 * c,
               1e9 * extra / static_cast<double>(examined[N]));
  }
  *detail = fmt("n = 6, 1000 targets, best of 25, baseline N=0 %.3g ms; %sspread %.2fx (limit 2x)",
                1e3 * total[0], per.c_str(), hi / lo);
  return hi / lo <= 2.0;
}

void criterion_10() {
  std::string a, b;
  const bool repro = cli_reproducible(&a);
  const bool linear = timing_linear(&b);
  line(10, repro && linear, "reproducible artifacts; query time linear in N", a + "; " + b);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::pair<int, void (*)()> criteria[] = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},  {5, criterion_5},
      {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}};
  for (const auto& [id, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      line(id, false, "raised", e.what());
    }
  }
  std::printf("%d of 10 criteria failed, %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
