#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gddp/gaussian.hpp"
#include "gddp/gddp.hpp"
#include "gddp/lattice.hpp"

namespace gddp {

enum class Relation { LessEq, Less, GreaterEq, Greater };
std::string to_string(Relation r);
Relation relation_from_string(const std::string& name);

/// One inequality "lhs REL bound", evaluated at the adverse end of the
/// certified interval for lhs.
struct BoundReport {
  std::string check;
  std::string lattice;                    // basis provenance
  std::map<std::string, double> params;   // s, r0, beta, shift index, ...
  Relation relation = Relation::LessEq;
  double lhs = 0.0;
  Interval lhs_interval;
  double bound = 0.0;
  double margin = 0.0;           // signed distance from lhs to the bound, positive when satisfied
  double certified_error = 0.0;  // distance from lhs to the adverse interval end
  bool pass = false;
};

/// Fills margin, certified_error and pass from lhs, lhs_interval, bound, relation.
BoundReport make_report(std::string check, const Basis& basis, Relation rel, double lhs,
                        Interval lhs_interval, double bound);

/// D_{L,s} restricted to an enumerated window, with certified probabilities
/// of events. The window grows on demand and is shared across events.
class GaussianLab {
 public:
  GaussianLab(const Basis& basis, double s, std::uint64_t cap = kDefaultEnumerationCap);

  const Basis& basis() const { return enumerator_.basis(); }
  const BallEnumerator& enumerator() const { return enumerator_; }
  double s() const { return s_; }

  /// Window containing the ball of `min_radius` whose omitted mass is below
  /// `fraction` of the total.
  const GaussianWindow& window(double min_radius, double fraction);

  /// Pr[X in A] for the event A given as a predicate on embeddings, using a
  /// window of at least `min_radius`. When A lies inside the ball of
  /// `event_radius` and the window covers it, the event mass is exact.
  Interval probability(const std::function<bool(const VectorXd&)>& event, double min_radius,
                       double fraction = 1e-13, std::optional<double> event_radius = std::nullopt);

  /// Certified rho_s(L) (shared by every ratio computed on this lab).
  const MassEstimate& lattice_mass();

 private:
  BallEnumerator enumerator_;
  double s_;
  std::optional<GaussianWindow> window_;
  std::optional<MassEstimate> mass_;
};

struct TailCheckSpec {
  Basis basis;
  double s = 1.0;
  VectorXd v;            // unit direction
  double r0 = 1.0;
  double r = 0.1;        // in (0, 1)
  double beta = 1.0;
  std::optional<double> eta;  // smoothing parameter; computed when absent
};

/// rho_s(L - t) / rho_s(L) in [1/3, 1]; two reports per shift (lower, upper).
std::vector<BoundReport> smoothing_ratio_check(const Basis& basis, double s,
                                               const std::vector<VectorXd>& shifts,
                                               std::optional<double> eta = std::nullopt,
                                               std::uint64_t cap = kDefaultEnumerationCap);

/// exp(-pi beta²) E[exp(2 pi beta <X, v> / s)] = rho_s(L - beta s v) / rho_s(L),
/// computed both as an expectation and as a mass ratio, checked in [1/3, 1].
std::vector<BoundReport> mgf_sandwich_check(const TailCheckSpec& spec);
std::vector<BoundReport> mgf_sandwich_check(GaussianLab& lab, const VectorXd& v, double beta);

/// Pr[<X, v> >= r0] <= exp(-pi r0² / s²) and > exp(-pi (r0/s + 2)²).
/// The lower bound is only evaluated when `with_lower` is set (it needs s >= eta).
std::vector<BoundReport> projection_tail_check(const TailCheckSpec& spec);
std::vector<BoundReport> projection_tail_check(GaussianLab& lab, const VectorXd& v, double r0,
                                               bool with_lower = true);

/// Pr[‖v - X‖² <= 1 - r] > exp(-pi (r/s + n s + 4)² / 4) - 2^-n.
BoundReport get_shorter_check(const TailCheckSpec& spec);
BoundReport get_shorter_check(GaussianLab& lab, const VectorXd& v, double r);

/// Pr[‖X‖ >= sqrt(n) s] <= 2^-n as a report.
BoundReport banaszczyk_report(GaussianLab& lab);

struct EpsNet {
  Index n = 0;
  double eps = 0.0;
  double probe_resolution = 0.0;
  MatrixXd points;   // n x M, unit columns
  std::size_t probe_count = 0;
  double worst_probe_distance = 0.0;
  bool covering_certified = false;
  BigInt size_bound;  // floor((1 + 2/eps)^n)

  Index size() const { return points.cols(); }
};

inline constexpr std::uint64_t kDefaultProbeCap = 2'000'000;

/// Unit vectors of the cube-surface grid, radially projected; every point of
/// the sphere lies within `resolution` of one of them.
MatrixXd sphere_probes(Index n, double resolution, std::uint64_t cap = kDefaultProbeCap);

/// Greedy farthest-point net over the probe set, started at e_1.
EpsNet build_eps_net(Index n, double eps, double probe_resolution,
                     std::uint64_t cap = kDefaultProbeCap);

/// Largest distance from a probe to its nearest net point.
double covering_distance(const MatrixXd& net, const MatrixXd& probes);

struct UnionBoundReport {
  Index n = 0;
  double alpha = 0.0;
  double s = 0.0;
  double d = 0.0;
  double net_eps = 0.0;
  Index net_size = 0;
  double threshold = 0.0;            // 1 - 5/n²
  std::vector<Interval> p;           // per net point
  Interval min_p;
  double chain_bound = 0.0;          // exp(-(n^{1/2-alpha} + 4)²)
  double chain_bound_n_alpha = 0.0;  // n² / N_alpha
  BoundReport chain;                 // min_j p_j >= chain_bound
  std::optional<double> needed_N;    // smallest N with (1-p)^N < 2^-n / M; empty when p = 0
  bool needed_N_verified = false;
  std::uint64_t simulated_N = 0;
  double failure_probability = 1.0;  // (1 - min p)^simulated_N
  std::uint64_t seed = 0;
  Index empirical_misses = 0;        // net points no simulated sample lands near
};

/// Normalizes d = 1, builds a 1/n³ net and evaluates the per-net-point
/// success probability of one sample.
UnionBoundReport union_bound_experiment(const Basis& basis, double alpha, std::uint64_t seed,
                                        std::uint64_t simulated_N = 1000,
                                        std::uint64_t cap = kDefaultEnumerationCap,
                                        std::uint64_t probe_cap = kDefaultProbeCap);

struct CorpusOptions {
  std::vector<Index> dims{1, 2, 3};
  int lattices_per_dim = 20;
  int entry_bound = 5;
  std::vector<double> s_factors{1.0, 1.5, 3.0};
  int shifts = 25;
  int directions = 10;
  std::vector<double> r0{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
  std::vector<double> betas{0.5, 1.0, 2.0};
  std::vector<double> rs{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  double below_smoothing_factor = 0.5;
  std::vector<double> banaszczyk_factors{1.0, 2.0};
  std::uint64_t seed = 20240601;
  std::uint64_t cap = kDefaultEnumerationCap;
};

/// The fixed lattices of the standard corpus (uniform-integer entries).
std::vector<Basis> corpus_bases(const CorpusOptions& options = {});

struct CorpusResult {
  std::vector<BoundReport> reports;
  std::size_t failures() const;
};

/// Runs every check over the corpus; `checks` selects by name prefix
/// ("smoothing_ratio", "mgf", "projection", "get_shorter", "banaszczyk"); empty means all.
CorpusResult run_corpus(const CorpusOptions& options = {},
                        const std::vector<std::string>& checks = {});

}  // namespace gddp
