#include "gddp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gddp/analysis.hpp"
#include "gddp/rng.hpp"

namespace gddp::cli {

using io::json;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<Target> cell_targets(const LllResult& reduced, int count, std::uint64_t seed) {
  const MatrixXd& b = reduced.basis.rows_double();
  const Index n = b.rows();
  Rng rng(seed);
  std::vector<Target> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    VectorXd u(n);
    for (Index k = 0; k < n; ++k) u(k) = rng.uniform();
    out.emplace_back(VectorXd(b.transpose() * u));
  }
  return out;
}

Preprocessing restrict_to(const Preprocessing& prep, double alpha, std::uint64_t N) {
  if (N > prep.size()) throw std::invalid_argument("N exceeds the available samples");
  const Index n = prep.dim();
  GddpParams params = prep.params;
  params.alpha = alpha;
  params.N = N;
  params.d = guarantee_distance(n, alpha, params.s);
  params.theorem_regime = in_theorem_regime(n, alpha);
  BigInt na = n_alpha(n, alpha);
  params.theorem_guarantee = params.theorem_regime && BigInt(N) >= na;
  SampleSet vectors = prep.vectors;
  vectors.samples.resize(static_cast<std::size_t>(N));
  std::vector<std::string> warnings;
  if (!params.theorem_regime) warnings.push_back("alpha outside the theorem regime 2/log2(n) <= alpha <= 1/2");
  if (!params.theorem_guarantee && BigInt(N) < na)
    warnings.push_back("N below N_alpha: theorem guarantee void (empirical mode)");
  return Preprocessing(params, prep.basis, prep.reduced, prep.smoothing, std::move(vectors), std::move(na),
                       std::move(warnings));
}

BenchTable bench(const Basis& basis, const std::vector<double>& alphas, const std::vector<std::uint64_t>& Ns,
                 int target_count, std::uint64_t seed, const PreprocessOptions& options) {
  if (alphas.empty() || Ns.empty()) throw std::invalid_argument("bench needs at least one alpha and one N");
  if (target_count <= 0) throw std::invalid_argument("target count must be positive");
  const std::uint64_t max_N = *std::max_element(Ns.begin(), Ns.end());
  const Preprocessing full = preprocess(basis, alphas.front(), max_N, seed, options);
  const std::vector<Target> targets = cell_targets(full.reduced, target_count, derive_seed(seed, 1));

  BenchTable table;
  table.n = basis.dim();
  table.eta = full.smoothing.eta;
  table.s = full.params.s;
  table.targets = target_count;
  table.seed = seed;
  const double scale = std::sqrt(static_cast<double>(table.n)) * table.eta;

  for (double alpha : alphas) {
    for (std::uint64_t N : Ns) {
      const Preprocessing prep = restrict_to(full, alpha, N);
      std::vector<double> dist, iters;
      std::uint64_t scans = 0;
      double seconds = 0.0;
      int within = 0;
      for (const Target& t : targets) {
        const auto t0 = std::chrono::steady_clock::now();
        const GddSolution sol = query(prep, t);
        seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        dist.push_back(sol.distance);
        iters.push_back(static_cast<double>(sol.trace.steps.size()));
        scans += sol.trace.steps.size() + 1;
        if (sol.distance <= prep.params.d) ++within;
      }
      BenchRow row;
      row.alpha = alpha;
      row.N = N;
      row.median_distance = median(dist);
      row.distance_over_sqrt_n_eta = row.median_distance / scale;
      row.median_iterations = median(iters);
      row.wall_time = seconds;
      row.scans = scans;
      row.seconds_per_scan = seconds / static_cast<double>(scans);
      row.d = prep.params.d;
      row.fraction_within_d = static_cast<double>(within) / target_count;
      table.rows.push_back(row);
    }
  }
  return table;
}

json to_json(const BenchTable& t) {
  json rows = json::array();
  for (const BenchRow& r : t.rows)
    rows.push_back({{"alpha", r.alpha},
                    {"N", r.N},
                    {"median_distance", r.median_distance},
                    {"distance_over_sqrt_n_eta", r.distance_over_sqrt_n_eta},
                    {"median_iterations", r.median_iterations},
                    {"wall_time", r.wall_time},
                    {"scans", r.scans},
                    {"seconds_per_scan", r.seconds_per_scan},
                    {"d", r.d},
                    {"fraction_within_d", r.fraction_within_d}});
  return {{"n", t.n}, {"eta", t.eta}, {"s", t.s}, {"targets", t.targets}, {"seed", t.seed}, {"rows", rows}};
}

std::string format_table(const BenchTable& t) {
  std::ostringstream os;
  os << "n = " << t.n << ", eta = " << std::setprecision(6) << t.eta << ", targets = " << t.targets << "\n";
  os << std::setw(6) << "alpha" << std::setw(9) << "N" << std::setw(14) << "median_dist" << std::setw(12)
     << "dist/rn.eta" << std::setw(10) << "med_iter" << std::setw(12) << "wall_s" << std::setw(12) << "d"
     << std::setw(10) << "within_d" << "\n";
  for (const BenchRow& r : t.rows) {
    os << std::setw(6) << std::setprecision(3) << r.alpha << std::setw(9) << r.N << std::setw(14)
       << std::setprecision(6) << r.median_distance << std::setw(12) << std::setprecision(4)
       << r.distance_over_sqrt_n_eta << std::setw(10) << r.median_iterations << std::setw(12)
       << std::setprecision(4) << r.wall_time << std::setw(12) << std::setprecision(5) << r.d << std::setw(10)
       << std::setprecision(3) << r.fraction_within_d << "\n";
  }
  return os.str();
}

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const std::string& s : split(text)) {
    try {
      std::size_t used = 0;
      T v;
      if constexpr (std::is_same_v<T, double>)
        v = std::stod(s, &used);
      else
        v = static_cast<T>(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError(std::string("bad ") + what + " list entry '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
  return out;
}

json file_input(const std::string& path) { return {{"path", path}, {"fnv1a", io::fnv1a(io::read_file(path))}}; }

Basis load_basis(const std::string& path) {
  const json j = io::read_json(path);
  return io::basis_from_json(j.contains("basis") ? j["basis"] : j);
}

Preprocessing load_prep(const std::string& path) {
  const json j = io::read_json(path);
  return io::preprocessing_from_json(j.contains("preprocessing") ? j["preprocessing"] : j);
}

Target load_target(const std::string& path) {
  const json j = io::read_json(path);
  return io::target_from_json(j.contains("target") ? j["target"] : j);
}

void banner(const Preprocessing& p) {
  if (!p.params.theorem_guarantee)
    std::cerr << "note: theorem guarantee void (N = " << p.params.N << " < N_alpha = " << p.n_alpha.str()
              << " or alpha outside the regime); results are empirical\n";
}

struct Common {
  std::uint64_t seed = 0;
  std::uint64_t enum_cap = 0;
  std::uint64_t probe_cap = 0;
  std::string out = "-";

  void add(CLI::App* app, bool with_seed = true) {
    if (with_seed) app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--enum-cap", enum_cap, "enumeration point budget (overrides GDDP_ENUM_CAP)");
    app->add_option("--probe-cap", probe_cap, "sphere probe budget (overrides GDDP_PROBE_CAP)");
    app->add_option("--out", out, "output file, - for standard output")->capture_default_str();
  }

  io::RunConfig config(double tol = 1e-11) const {
    io::RunConfig c = io::config_from_env();
    c.seed = seed;
    if (enum_cap) c.enumeration_cap = enum_cap;
    if (probe_cap) c.probe_cap = probe_cap;
    c.smoothing_tol = tol;
    c.out = out;
    return c;
  }
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Guaranteed distance decoding with discrete Gaussian preprocessing", "gddp"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", io::kToolVersion);

  // gen
  Common gen_c;
  Index gen_n = 0;
  std::string gen_style = "uniform-integer";
  std::int64_t gen_bound = 5, gen_modulus = 1024;
  std::string gen_scale = "1";
  auto* gen = app.add_subcommand("gen", "random basis");
  gen->add_option("--n", gen_n, "dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--style", gen_style, "uniform-integer | knapsack | scaled-identity")->capture_default_str();
  gen->add_option("--bound", gen_bound, "entry bound for uniform-integer")->capture_default_str();
  gen->add_option("--modulus", gen_modulus, "modulus for knapsack")->capture_default_str();
  gen->add_option("--scale", gen_scale, "factor for scaled-identity (p/q or decimal)")->capture_default_str();
  gen_c.add(gen);

  // eta
  Common eta_c;
  std::string eta_basis;
  double eta_tol = 1e-11;
  auto* eta = app.add_subcommand("eta", "smoothing parameter");
  eta->add_option("--basis", eta_basis, "basis file")->required();
  eta->add_option("--tol", eta_tol, "relative bracket width")->capture_default_str();
  eta_c.add(eta, false);

  // preprocess
  Common pre_c;
  std::string pre_basis;
  double pre_alpha = 0.5, pre_tol = 1e-11, pre_quality = kDefaultKleinQuality;
  std::uint64_t pre_N = 1000;
  bool pre_theorem = false;
  auto* pre = app.add_subcommand("preprocess", "discrete Gaussian preprocessing");
  pre->add_option("--basis", pre_basis, "basis file")->required();
  pre->add_option("--alpha", pre_alpha, "distance exponent in [0, 1/2]")->required();
  auto* pre_N_opt = pre->add_option("--N", pre_N, "number of samples")->capture_default_str();
  pre->add_flag("--theorem-N", pre_theorem, "draw N_alpha samples (fails when over budget)")->excludes(pre_N_opt);
  pre->add_option("--tol", pre_tol, "smoothing bracket tolerance")->capture_default_str();
  pre->add_option("--klein-quality", pre_quality, "Klein width multiplier (n > 10)")->capture_default_str();
  pre_c.add(pre);

  // query
  Common q_c;
  std::string q_prep, q_target, q_trace;
  auto* q = app.add_subcommand("query", "decode one target");
  q->add_option("--prep", q_prep, "preprocessing file")->required();
  q->add_option("--target", q_target, "target file {n, t}")->required();
  q->add_option("--trace", q_trace, "write the query trace here");
  q_c.add(q, false);

  // verify
  Common v_c;
  std::string v_prep, v_basis, v_target, v_solution;
  double v_d = -1.0;
  auto* ver = app.add_subcommand("verify", "check a solution: exit 0 iff it passes");
  ver->add_option("--prep", v_prep, "preprocessing file (supplies basis and d)");
  ver->add_option("--basis", v_basis, "basis file (with --d)");
  ver->add_option("--d", v_d, "distance bound, overrides the preprocessing value");
  ver->add_option("--target", v_target, "target file")->required();
  ver->add_option("--solution", v_solution, "query output")->required();
  v_c.add(ver, false);

  // bench
  Common b_c;
  std::string b_basis, b_alphas = "0.1,0.3,0.5", b_Ns = "100,1000,10000";
  Index b_n = 0;
  int b_targets = 50;
  bool b_json = false;
  auto* b = app.add_subcommand("bench", "distance/time table over (alpha, N)");
  auto* b_basis_opt = b->add_option("--basis", b_basis, "basis file");
  b->add_option("--n", b_n, "random uniform-integer basis of this dimension")->excludes(b_basis_opt);
  b->add_option("--alphas", b_alphas, "comma separated")->capture_default_str();
  b->add_option("--N", b_Ns, "comma separated sample counts")->capture_default_str();
  b->add_option("--targets", b_targets, "targets per row")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_flag("--json", b_json, "machine-readable table");
  b_c.add(b);

  // lemmas
  Common l_c;
  std::string l_corpus = "standard", l_checks;
  auto* lem = app.add_subcommand("lemmas", "exact verification of the Gaussian inequalities over a corpus");
  lem->add_option("--corpus", l_corpus, "standard | smoke")->capture_default_str()->check(
      CLI::IsMember({"standard", "smoke"}));
  lem->add_option("--checks", l_checks, "comma separated name prefixes (default all)");
  l_c.add(lem, false);

  // union-bound
  Common u_c;
  Index u_n = 2;
  double u_alpha = 0.5;
  std::string u_scale = "3";
  std::uint64_t u_sim = 1000;
  auto* ub = app.add_subcommand("union-bound", "net experiment on scaled Z^n");
  ub->add_option("--n", u_n, "dimension (<= 3)")->capture_default_str()->check(CLI::Range(1, 3));
  ub->add_option("--alpha", u_alpha, "distance exponent")->capture_default_str();
  ub->add_option("--scale", u_scale, "lattice scale c (p/q or decimal)")->capture_default_str();
  ub->add_option("--simulate", u_sim, "simulated preprocessing size")->capture_default_str();
  u_c.add(ub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const io::RunConfig cfg = gen_c.config();
      RandomBasisOptions opts;
      opts.bound = gen_bound;
      opts.modulus = gen_modulus;
      opts.scale = io::parse_rational(gen_scale);
      const Basis basis = random_basis(gen_n, basis_style_from_string(gen_style), cfg.seed, opts);
      json a = io::artifact("basis", cfg,
                            {{"n", gen_n}, {"style", gen_style}, {"bound", gen_bound}, {"modulus", gen_modulus},
                             {"scale", gen_scale}});
      a["basis"] = io::to_json(basis);
      io::write_text(cfg.out, io::dump(a));
      return 0;
    }
    if (*eta) {
      const io::RunConfig cfg = eta_c.config(eta_tol);
      const Basis basis = load_basis(eta_basis);
      const SmoothingEstimate e = smoothing_parameter(basis, eta_tol, kSmoothingThreshold, cfg.enumeration_cap);
      json a = io::artifact("smoothing", cfg, {{"basis", file_input(eta_basis)}});
      a["basis_hash"] = io::basis_hash(basis);
      a["smoothing"] = io::to_json(e);
      io::write_text(cfg.out, io::dump(a));
      return 0;
    }
    if (*pre) {
      const io::RunConfig cfg = pre_c.config(pre_tol);
      const Basis basis = load_basis(pre_basis);
      PreprocessOptions opts;
      opts.enumeration_cap = cfg.enumeration_cap;
      opts.smoothing_tol = pre_tol;
      opts.klein_quality = pre_quality;
      std::optional<std::uint64_t> N;
      if (!pre_theorem) N = pre_N;
      const Preprocessing p = preprocess(basis, pre_alpha, N, cfg.seed, opts);
      banner(p);
      json a = io::artifact("preprocessing", cfg,
                            {{"basis", file_input(pre_basis)}, {"alpha", pre_alpha},
                             {"N", N ? json(*N) : json("N_alpha")}, {"klein_quality", pre_quality}});
      a["preprocessing"] = io::to_json(p);
      io::write_text(cfg.out, io::dump(a));
      return 0;
    }
    if (*q) {
      const io::RunConfig cfg = q_c.config();
      const Preprocessing p = load_prep(q_prep);
      const Target t = load_target(q_target);
      if (t.dim() != p.dim()) throw DimensionMismatchError(p.dim(), t.dim());
      banner(p);
      const GddSolution sol = query(p, t);
      const json inputs = {{"prep", file_input(q_prep)}, {"target", file_input(q_target)}};
      json a = io::artifact("solution", cfg, inputs);
      a["basis_hash"] = io::basis_hash(p.basis);
      a["d"] = p.params.d;
      a["target"] = io::to_json(t);
      a["solution"] = io::to_json(sol);
      if (!q_trace.empty()) {
        json tr = io::artifact("trace", cfg, inputs);
        tr["trace"] = io::to_json(sol.trace);
        io::write_text(q_trace, io::dump(tr));
      }
      io::write_text(cfg.out, io::dump(a));
      return 0;
    }
    if (*ver) {
      const io::RunConfig cfg = v_c.config();
      if (v_prep.empty() == v_basis.empty()) throw UsageError("verify needs exactly one of --prep, --basis");
      std::optional<Basis> basis;
      double d = v_d;
      json inputs = {{"target", file_input(v_target)}, {"solution", file_input(v_solution)}};
      if (!v_prep.empty()) {
        const Preprocessing p = load_prep(v_prep);
        basis = p.basis;
        if (d < 0.0) d = p.params.d;
        inputs["prep"] = file_input(v_prep);
      } else {
        if (d < 0.0) throw UsageError("--basis needs --d");
        basis = load_basis(v_basis);
        inputs["basis"] = file_input(v_basis);
      }
      const Target t = load_target(v_target);
      const json sj = io::read_json(v_solution);
      const LatticeVector y = io::solution_vector_from_json(sj.contains("solution") ? sj["solution"] : sj);
      if (y.coeffs.size() != basis->dim() || y.embedding.size() != basis->dim())
        throw DimensionMismatchError(basis->dim(), y.embedding.size());
      const Verdict v = verify_solution(*basis, t, y, d);
      json a = io::artifact("verdict", cfg, inputs);
      a["verdict"] = io::to_json(v);
      io::write_text(cfg.out, io::dump(a));
      return v.pass() ? 0 : 1;
    }
    if (*b) {
      const io::RunConfig cfg = b_c.config();
      if (b_basis.empty() && b_n <= 0) throw UsageError("bench needs --basis or --n");
      const Basis basis =
          b_basis.empty() ? random_basis(b_n, BasisStyle::UniformInteger, cfg.seed) : load_basis(b_basis);
      const auto alphas = parse_list<double>(b_alphas, "alpha");
      const auto Ns = parse_list<std::uint64_t>(b_Ns, "N");
      PreprocessOptions opts;
      opts.enumeration_cap = cfg.enumeration_cap;
      const BenchTable table = bench(basis, alphas, Ns, b_targets, cfg.seed, opts);
      if (b_json) {
        json inputs = {{"alphas", alphas}, {"N", Ns}, {"targets", b_targets}};
        if (b_basis.empty())
          inputs["n"] = b_n;
        else
          inputs["basis"] = file_input(b_basis);
        json a = io::artifact("bench", cfg, inputs);
        a["basis_hash"] = io::basis_hash(basis);
        a["table"] = to_json(table);
        io::write_text(cfg.out, io::dump(a));
      } else {
        io::write_text(cfg.out, format_table(table));
      }
      return 0;
    }
    if (*lem) {
      const io::RunConfig cfg = l_c.config();
      CorpusOptions opts;
      opts.cap = cfg.enumeration_cap;
      if (l_corpus == "smoke") {
        opts.lattices_per_dim = 2;
        opts.shifts = 5;
        opts.directions = 2;
      }
      const std::vector<std::string> checks = split(l_checks);
      const CorpusResult r = run_corpus(opts, checks);
      json reports = json::array();
      std::map<std::string, std::pair<std::size_t, std::size_t>> per;
      for (const BoundReport& rep : r.reports) {
        reports.push_back(io::to_json(rep));
        auto& [total, failed] = per[rep.check];
        ++total;
        if (!rep.pass) ++failed;
      }
      json summary = json::object();
      for (const auto& [name, tf] : per) summary[name] = {{"reports", tf.first}, {"failures", tf.second}};
      json a = io::artifact("lemmas", cfg,
                            {{"corpus", l_corpus}, {"corpus_seed", opts.seed}, {"checks", checks}});
      a["total"] = r.reports.size();
      a["failures"] = r.failures();
      a["summary"] = std::move(summary);
      a["reports"] = std::move(reports);
      io::write_text(cfg.out, io::dump(a));
      for (const auto& [name, tf] : per)
        std::cerr << name << ": " << tf.first - tf.second << "/" << tf.first << " pass\n";
      return r.failures() == 0 ? 0 : 1;
    }
    if (*ub) {
      const io::RunConfig cfg = u_c.config();
      const Rational c = io::parse_rational(u_scale);
      const Basis basis = Basis::identity(u_n).scaled(c);
      const UnionBoundReport r =
          union_bound_experiment(basis, u_alpha, cfg.seed, u_sim, cfg.enumeration_cap, cfg.probe_cap);
      json a = io::artifact("union_bound", cfg,
                            {{"n", u_n}, {"alpha", u_alpha}, {"scale", u_scale}, {"simulated_N", u_sim}});
      a["report"] = io::to_json(r);
      io::write_text(cfg.out, io::dump(a));
      return r.chain.pass && r.needed_N ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"gddp"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gddp::cli
