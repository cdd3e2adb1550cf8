#include "gddp/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gddp::io {

namespace {

std::uint64_t env_cap(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  const std::uint64_t cap = std::stoull(v);
  if (cap == 0) throw std::invalid_argument(std::string(name) + " must be positive");
  return cap;
}

BigInt parse_integer(const std::string& text) {
  std::size_t i = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
  if (i == text.size() || text.find_first_not_of("0123456789", i) != std::string::npos)
    throw std::invalid_argument("not an integer: '" + text + "'");
  const std::size_t first = std::min(text.find_first_not_of('0', i), text.size() - 1);
  const BigInt v(text.substr(first));
  return text[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(parse_integer(text.substr(0, slash)), den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_integer(text));
  // Decimal string: digits after the point over a power of ten.
  const std::string frac = text.substr(dot + 1);
  const std::string whole = text.substr(0, dot);
  const bool neg = !whole.empty() && whole[0] == '-';
  BigInt den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::string sign_free = (neg || (!whole.empty() && whole[0] == '+')) ? whole.substr(1) : whole;
  const BigInt mag = parse_integer((sign_free.empty() ? "0" : sign_free) + (frac.empty() ? "" : frac));
  return Rational(neg ? BigInt(-mag) : mag, den);
}

namespace {

std::string rational_text(const Rational& q) { return q.str(); }

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json vector_json(const VectorXi& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VectorXd dvec(const json& a) {
  VectorXd v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
  return v;
}

VectorXi ivec(const json& a) {
  VectorXi v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<std::int64_t>();
  return v;
}

json int_matrix_json(const MatrixXi& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(VectorXi(m.row(i).transpose())));
  return rows;
}

MatrixXi int_matrix(const json& rows, Index n) {
  if (static_cast<Index>(rows.size()) != n) throw DimensionMismatchError(n, static_cast<Index>(rows.size()));
  MatrixXi m(n, n);
  for (Index i = 0; i < n; ++i) {
    const VectorXi r = ivec(rows[static_cast<std::size_t>(i)]);
    if (r.size() != n) throw DimensionMismatchError(n, r.size());
    m.row(i) = r.transpose();
  }
  return m;
}

}  // namespace

RunConfig config_from_env(RunConfig base) {
  base.enumeration_cap = env_cap("GDDP_ENUM_CAP", base.enumeration_cap);
  base.probe_cap = env_cap("GDDP_PROBE_CAP", base.probe_cap);
  return base;
}

json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"enumeration_cap", c.enumeration_cap},
          {"probe_cap", c.probe_cap},
          {"smoothing_tol", c.smoothing_tol},
          {"out", c.out}};
}

std::string fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

json artifact(const std::string& kind, const RunConfig& config, const json& inputs) {
  return {{"kind", kind}, {"tool_version", kToolVersion}, {"config", to_json(config)}, {"inputs", inputs}};
}

// ---------------------------------------------------------------- basis, target

json to_json(const Basis& b) {
  json rows = json::array();
  for (Index i = 0; i < b.dim(); ++i) {
    json row = json::array();
    for (Index j = 0; j < b.dim(); ++j) row.push_back(rational_text(b.rows()(i, j)));
    rows.push_back(std::move(row));
  }
  json j = {{"n", b.dim()}, {"rows", std::move(rows)}, {"provenance", b.provenance()}};
  j["seed"] = b.seed() ? json(*b.seed()) : json(nullptr);
  return j;
}

Basis basis_from_json(const json& j) {
  const Index n = j.at("n").get<Index>();
  const json& rows = j.at("rows");
  if (static_cast<Index>(rows.size()) != n) throw DimensionMismatchError(n, static_cast<Index>(rows.size()));
  MatrixXq m(n, n);
  for (Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != n) throw DimensionMismatchError(n, static_cast<Index>(row.size()));
    for (Index k = 0; k < n; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      m(i, k) = e.is_string() ? parse_rational(e.get<std::string>()) : Rational(e.get<std::int64_t>());
    }
  }
  std::optional<std::uint64_t> seed;
  if (j.contains("seed") && !j["seed"].is_null()) seed = j["seed"].get<std::uint64_t>();
  return Basis(std::move(m), j.value("provenance", std::string()), seed);
}

std::string basis_hash(const Basis& b) {
  json j = to_json(b);
  j.erase("provenance");
  j.erase("seed");
  return fnv1a(j.dump());
}

json to_json(const Target& t) { return {{"n", t.dim()}, {"t", vector_json(t.t)}}; }

Target target_from_json(const json& j) {
  VectorXd t = dvec(j.at("t"));
  if (j.contains("n") && j["n"].get<Index>() != t.size()) throw DimensionMismatchError(j["n"].get<Index>(), t.size());
  return Target(std::move(t));
}

// ---------------------------------------------------------------- samples

json to_json(const SampleSet& s, const Basis& basis) {
  json samples = json::array();
  for (const LatticeVector& y : s.samples) samples.push_back(vector_json(y.coeffs));
  json j = {{"basis_hash", basis_hash(basis)},
            {"s", s.s},
            {"sampler", to_string(s.sampler)},
            {"seed", s.seed}};
  j["stat_distance_bound"] = s.stat_distance_bound ? json(*s.stat_distance_bound) : json(nullptr);
  j["samples"] = std::move(samples);
  return j;
}

SampleSet samples_from_json(const json& j, const Basis& basis) {
  if (j.at("basis_hash").get<std::string>() != basis_hash(basis))
    throw std::invalid_argument("sample set was drawn for a different basis");
  SampleSet s;
  s.s = j.at("s").get<double>();
  s.sampler = sampler_kind_from_string(j.at("sampler").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("stat_distance_bound").is_null()) s.stat_distance_bound = j["stat_distance_bound"].get<double>();
  for (const json& c : j.at("samples")) s.samples.push_back(LatticeVector::from_coeffs(basis, ivec(c)));
  return s;
}

// ---------------------------------------------------------------- preprocessing

json to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

json to_json(const SmoothingEstimate& e) {
  return {{"eta", e.eta},
          {"bracket", to_json(e.bracket)},
          {"dual_mass_at_eta", e.dual_mass_at_eta},
          {"dual_mass_interval", to_json(e.dual_mass_interval)},
          {"iterations", e.iterations}};
}

SmoothingEstimate smoothing_from_json(const json& j) {
  SmoothingEstimate e;
  e.eta = j.at("eta").get<double>();
  e.bracket = {j.at("bracket")[0].get<double>(), j.at("bracket")[1].get<double>()};
  e.dual_mass_at_eta = j.at("dual_mass_at_eta").get<double>();
  e.dual_mass_interval = {j.at("dual_mass_interval")[0].get<double>(), j.at("dual_mass_interval")[1].get<double>()};
  e.iterations = j.at("iterations").get<int>();
  return e;
}

json to_json(const Preprocessing& p) {
  json params = {{"alpha", p.params.alpha},
                 {"n", p.params.n},
                 {"s", p.params.s},
                 {"N", p.params.N},
                 {"d", p.params.d},
                 {"theorem_regime", p.params.theorem_regime},
                 {"theorem_guarantee", p.params.theorem_guarantee}};
  return {{"basis", to_json(p.basis)},
          {"params", std::move(params)},
          {"n_alpha", p.n_alpha.str()},
          {"smoothing", to_json(p.smoothing)},
          {"reduction_transform", int_matrix_json(p.reduced.transform)},
          {"warnings", p.warnings},
          {"vectors", to_json(p.vectors, p.basis)}};
}

Preprocessing preprocessing_from_json(const json& j) {
  Basis basis = basis_from_json(j.at("basis"));
  const Index n = basis.dim();
  const json& pj = j.at("params");
  GddpParams params;
  params.alpha = pj.at("alpha").get<double>();
  params.n = pj.at("n").get<Index>();
  params.s = pj.at("s").get<double>();
  params.N = pj.at("N").get<std::uint64_t>();
  params.d = pj.at("d").get<double>();
  params.theorem_regime = pj.at("theorem_regime").get<bool>();
  params.theorem_guarantee = pj.at("theorem_guarantee").get<bool>();
  if (params.n != n) throw DimensionMismatchError(n, params.n);

  const MatrixXi u = int_matrix(j.at("reduction_transform"), n);
  const Rational det = exact_determinant(MatrixXq(u.cast<Rational>()));
  if (det != 1 && det != -1) throw std::invalid_argument("reduction transform is not unimodular");
  LllResult reduced{Basis(MatrixXq(u.cast<Rational>() * basis.rows()), basis.provenance() + "+lll", basis.seed()), u};

  SampleSet vectors = samples_from_json(j.at("vectors"), basis);
  if (vectors.samples.size() != params.N) throw std::invalid_argument("sample count differs from params.N");
  return Preprocessing(params, std::move(basis), std::move(reduced), smoothing_from_json(j.at("smoothing")),
                       std::move(vectors), BigInt(j.at("n_alpha").get<std::string>()),
                       j.at("warnings").get<std::vector<std::string>>());
}

// ---------------------------------------------------------------- trace, solution

json to_json(const QueryTrace& t) {
  json steps = json::array();
  for (const QueryStep& s : t.steps)
    steps.push_back({{"index", s.index}, {"k", s.k}, {"norm_sq_before", s.norm_sq_before},
                     {"norm_sq_after", s.norm_sq_after}});
  return {{"t", vector_json(t.t)},
          {"t0", vector_json(t.t0)},
          {"babai_coeffs", vector_json(t.babai_coeffs)},
          {"steps", std::move(steps)},
          {"final_t", vector_json(t.final_t)},
          {"coeffs", vector_json(t.coeffs)},
          {"halt_reason", to_string(t.halt_reason)}};
}

QueryTrace trace_from_json(const json& j) {
  QueryTrace t;
  t.t = dvec(j.at("t"));
  t.t0 = dvec(j.at("t0"));
  t.babai_coeffs = ivec(j.at("babai_coeffs"));
  for (const json& s : j.at("steps"))
    t.steps.push_back({s.at("index").get<Index>(), s.at("k").get<std::int64_t>(),
                       s.at("norm_sq_before").get<double>(), s.at("norm_sq_after").get<double>()});
  t.final_t = dvec(j.at("final_t"));
  t.coeffs = ivec(j.at("coeffs"));
  t.halt_reason = halt_reason_from_string(j.at("halt_reason").get<std::string>());
  return t;
}

json to_json(const GddSolution& s) {
  return {{"y", {{"coeffs", vector_json(s.y.coeffs)}, {"embedding", vector_json(s.y.embedding)}}},
          {"distance", s.distance},
          {"iterations", s.trace.steps.size()},
          {"halt_reason", to_string(s.trace.halt_reason)}};
}

LatticeVector solution_vector_from_json(const json& j) {
  const json& y = j.at("y");
  LatticeVector v;
  v.coeffs = ivec(y.at("coeffs"));
  v.embedding = dvec(y.at("embedding"));
  v.norm_sq = v.embedding.squaredNorm();
  return v;
}

json to_json(const Verdict& v) {
  return {{"pass", v.pass()},
          {"membership", v.membership},
          {"within_distance", v.within_distance},
          {"distance", v.distance},
          {"d", v.d}};
}

// ---------------------------------------------------------------- lab reports

json to_json(const BoundReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  return {{"check", r.check},
          {"lattice", r.lattice},
          {"params", std::move(params)},
          {"relation", to_string(r.relation)},
          {"lhs", r.lhs},
          {"lhs_interval", to_json(r.lhs_interval)},
          {"bound", r.bound},
          {"margin", r.margin},
          {"certified_error", r.certified_error},
          {"pass", r.pass}};
}

json to_json(const UnionBoundReport& r) {
  json p = json::array();
  for (const Interval& i : r.p) p.push_back(to_json(i));
  json j = {{"n", r.n},
            {"alpha", r.alpha},
            {"s", r.s},
            {"d", r.d},
            {"net_eps", r.net_eps},
            {"net_size", r.net_size},
            {"threshold", r.threshold},
            {"min_p", to_json(r.min_p)},
            {"chain_bound", r.chain_bound},
            {"chain_bound_n_alpha", r.chain_bound_n_alpha},
            {"chain", to_json(r.chain)}};
  j["needed_N"] = r.needed_N ? json(*r.needed_N) : json(nullptr);
  j["needed_N_verified"] = r.needed_N_verified;
  j["simulated_N"] = r.simulated_N;
  j["failure_probability"] = r.failure_probability;
  j["empirical_misses"] = r.empirical_misses;
  j["seed"] = r.seed;
  j["p"] = std::move(p);
  return j;
}

}  // namespace gddp::io
