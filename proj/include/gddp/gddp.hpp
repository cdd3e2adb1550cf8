#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gddp/gaussian.hpp"
#include "gddp/lattice.hpp"

namespace gddp {

/// ceil(n² exp((n^{1/2 - alpha} + 4)²)), the preprocessing size that makes
/// the query loop provably succeed.
BigInt n_alpha(Index n, double alpha);

/// 2 / log2(n) <= alpha <= 1/2.
bool in_theorem_regime(Index n, double alpha);

/// n^{1/2 + alpha} s.
double guarantee_distance(Index n, double alpha, double s);

struct GddpParams {
  double alpha = 0.5;
  Index n = 0;
  double s = 0.0;
  std::uint64_t N = 0;
  double d = 0.0;
  bool theorem_regime = false;
  bool theorem_guarantee = false;  // N >= N_alpha and alpha in regime
};

/// The preprocessing P(L): discrete Gaussian samples plus a reduced basis for
/// initialization. Sample coefficients are over the original basis.
struct Preprocessing {
  GddpParams params;
  Basis basis;
  LllResult reduced;
  SmoothingEstimate smoothing;
  SampleSet vectors;
  BigInt n_alpha;
  std::vector<std::string> warnings;

  // Query-loop views of `vectors`.
  MatrixXd embeddings;  // n x N
  VectorXd norms_sq;

  Preprocessing(GddpParams params, Basis basis, LllResult reduced, SmoothingEstimate smoothing,
                SampleSet vectors, BigInt n_alpha, std::vector<std::string> warnings);

  Index dim() const { return basis.dim(); }
  std::size_t size() const { return vectors.samples.size(); }
};

struct PreprocessOptions {
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  Index exact_max_dim = 10;          // exact sampler up to here, Klein above
  double smoothing_tol = 1e-11;
  std::uint64_t max_samples = 100'000'000;
  double klein_quality = kDefaultKleinQuality;
};

/// Computes eta, sets s to the upper end of its bracket, and draws
/// `override_N` (or N_alpha) samples of D_{L,s}. Fully determined by `seed`.
Preprocessing preprocess(const Basis& basis, double alpha, std::optional<std::uint64_t> override_N,
                         std::uint64_t seed, const PreprocessOptions& options = {});

struct ReduceChoice {
  Index index = 0;
  std::int64_t k = 0;
  double norm_sq_after = 0.0;
};

/// First index i (in list order) for which k = round(<t, y_i> / ‖y_i‖²)
/// gives ‖t - k y_i‖² <= (1 - 1/n²) ‖t‖² with strict decrease.
std::optional<ReduceChoice> reduce_step(const VectorXd& t, const MatrixXd& vectors,
                                        const VectorXd& norms_sq);
std::optional<ReduceChoice> reduce_step(const VectorXd& t, const Preprocessing& prep);

/// ‖t - k y‖² <= (1 - 1/n²) ‖t‖² for some k in [-K, K], K = ceil(2‖t‖/‖y‖),
/// searched exhaustively (oracle for reduce_step).
bool contraction_exists_brute_force(const VectorXd& t, const VectorXd& y);

enum class HaltReason { NoImprovingPair, IterationCap };
std::string to_string(HaltReason reason);
HaltReason halt_reason_from_string(const std::string& name);

struct QueryStep {
  Index index = 0;
  std::int64_t k = 0;
  double norm_sq_before = 0.0;
  double norm_sq_after = 0.0;
};

struct QueryTrace {
  VectorXd t;
  VectorXd t0;
  VectorXi babai_coeffs;  // over the original basis
  std::vector<QueryStep> steps;
  VectorXd final_t;
  VectorXi coeffs;  // accumulated lattice vector y = t - final_t
  HaltReason halt_reason = HaltReason::NoImprovingPair;
};

struct GddSolution {
  LatticeVector y;
  double distance = 0.0;
  QueryTrace trace;
};

/// 100 n³.
std::uint64_t iteration_cap(Index n);

GddSolution query(const Preprocessing& prep, const Target& target);

/// Re-applies the recorded (i, k) steps to t0.
VectorXd replay(const Preprocessing& prep, const QueryTrace& trace);

struct Verdict {
  bool membership = false;
  bool within_distance = false;
  double distance = 0.0;
  double d = 0.0;

  bool pass() const { return membership && within_distance; }
};

/// Exact membership of `y` (rational solve of its embedding) and ‖y - t‖ <= d + 1e-9.
Verdict verify_solution(const Basis& basis, const Target& target, const LatticeVector& y, double d);
Verdict verify_solution(const Basis& basis, const Target& target, const GddSolution& sol, double d);

struct KMultipleReport {
  bool applicable = false;
  double hypothesis_value = 0.0;  // ‖t - y‖²
  int checked = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max over k of ‖beta t - k y‖² / ‖beta t‖²
  double bound = 0.0;        // 1 - 1/n²
};

/// For unit t with ‖t - y‖² <= 1 - 4/n², checks that every integer k in
/// [beta/2, beta] contracts beta t by 1 - 1/n².
KMultipleReport k_multiple_margin_check(const VectorXd& t, const VectorXd& y, double beta);

}  // namespace gddp
