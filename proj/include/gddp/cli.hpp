#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gddp/gddp.hpp"
#include "gddp/io.hpp"

namespace gddp::cli {

struct BenchRow {
  double alpha = 0.0;
  std::uint64_t N = 0;
  double median_distance = 0.0;
  double distance_over_sqrt_n_eta = 0.0;
  double median_iterations = 0.0;
  double wall_time = 0.0;         // seconds, query phase only
  std::uint64_t scans = 0;        // reduce_step calls over all targets
  double seconds_per_scan = 0.0;
  double d = 0.0;
  double fraction_within_d = 0.0;
};

struct BenchTable {
  Index n = 0;
  double eta = 0.0;
  double s = 0.0;
  int targets = 0;
  std::uint64_t seed = 0;
  std::vector<BenchRow> rows;
};

/// One preprocessing at max(Ns); rows use prefixes of the sample list.
/// Targets are uniform over the fundamental cell of the reduced basis.
BenchTable bench(const Basis& basis, const std::vector<double>& alphas,
                 const std::vector<std::uint64_t>& Ns, int target_count, std::uint64_t seed,
                 const PreprocessOptions& options = {});

/// Targets uniform over the parallelepiped spanned by the reduced basis rows.
std::vector<Target> cell_targets(const LllResult& reduced, int count, std::uint64_t seed);

/// Preprocessing restricted to its first N samples, re-parameterized for alpha.
Preprocessing restrict_to(const Preprocessing& prep, double alpha, std::uint64_t N);

io::json to_json(const BenchTable& t);
std::string format_table(const BenchTable& t);

double median(std::vector<double> v);

/// Exit codes: 0 success/pass, 1 verification failure, 2 usage or input error,
/// 3 runtime failure (budget, sampler precondition).
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace gddp::cli
