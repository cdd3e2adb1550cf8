#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gddp/analysis.hpp"
#include "gddp/gddp.hpp"

namespace gddp::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "gddp 0.1.0";

struct RunConfig {
  std::uint64_t seed = 0;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t probe_cap = kDefaultProbeCap;
  double smoothing_tol = 1e-11;
  std::string out = "-";
};

/// Caps overridden by GDDP_ENUM_CAP / GDDP_PROBE_CAP when set.
RunConfig config_from_env(RunConfig base = {});

json to_json(const RunConfig& c);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a(std::string_view bytes);

/// Pretty-printed JSON with a trailing newline; deterministic for equal input.
std::string dump(const json& j);

std::string read_file(const std::string& path);
json read_json(const std::string& path);
/// Writes to `path`, or standard output for "-".
void write_text(const std::string& path, const std::string& text);

/// Envelope shared by every artifact: kind, tool version, config, input hashes.
json artifact(const std::string& kind, const RunConfig& config, const json& inputs);

/// "p/q", integer or decimal text, parsed exactly.
Rational parse_rational(const std::string& text);

json to_json(const Basis& b);
Basis basis_from_json(const json& j);
/// Hash of the exact rows only (provenance and seed excluded).
std::string basis_hash(const Basis& b);

json to_json(const Target& t);
Target target_from_json(const json& j);

json to_json(const SampleSet& s, const Basis& basis);
/// Embeddings are recomputed from the coefficients; the basis hash must match.
SampleSet samples_from_json(const json& j, const Basis& basis);

json to_json(const SmoothingEstimate& e);
SmoothingEstimate smoothing_from_json(const json& j);

json to_json(const Preprocessing& p);
Preprocessing preprocessing_from_json(const json& j);

json to_json(const QueryTrace& t);
QueryTrace trace_from_json(const json& j);

json to_json(const GddSolution& s);
/// The embedding is taken from the file (so membership is re-checked by verify).
LatticeVector solution_vector_from_json(const json& j);

json to_json(const Verdict& v);
json to_json(const BoundReport& r);
json to_json(const UnionBoundReport& r);
json to_json(const Interval& i);

}  // namespace gddp::io
