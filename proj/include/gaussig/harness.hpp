#pragma once

// Corpus-driven verification runs: parse a corpus of functions and a suite
// configuration, run every applicable check on every entry, and persist the
// results as JSON lines plus a CSV summary. Baselines record per-check values
// so later runs can be compared for drift.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaussig/check_report.hpp"
#include "gaussig/expr.hpp"
#include "gaussig/quadrature.hpp"

namespace gaussig {

struct CorpusEntry {
  std::string id;
  Expr function;
  std::size_t dimension = 1;
  std::optional<double> lipschitz_bound;
  bool density = false;         // nonnegative with E_M[f] = 1
  bool in_domain_hint = false;  // usable as a statistic U of the exponential model
  std::optional<bool> exp_class;  // expected exponential-class verdict, when known
  std::vector<std::string> tags;
};

/// Throws ConfigError on malformed input (duplicate ids, bad expressions,
/// dimension lower than the expression's arity).
std::vector<CorpusEntry> parse_corpus(const nlohmann::json& j);
/// Throws IOFailure when the file cannot be read, ConfigError when it does not parse.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);

enum class Suite { Orlicz, Entropy, Manifold, TranslationOU, Sobolev };

std::string suite_name(Suite s);
/// Throws ConfigError for unknown names.
Suite suite_from_name(const std::string& s);
std::vector<Suite> all_suites();

struct SuiteConfig {
  std::vector<Suite> suites = all_suites();
  std::optional<Scheme> scheme;  // unset: Gauss-Hermite for n <= 4, QMC above
  std::size_t order = 0;         // Gauss-Hermite order override, 0 = default
  std::size_t samples = 4096;
  double identity_tolerance = 1e-8;
  double inequality_tolerance = 1e-6;
  std::filesystem::path out_dir = "gaussig-report";
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency

  QuadratureSpec spec_for(std::size_t dim) const;
};

/// Throws ConfigError on unknown keys or invalid values.
SuiteConfig parse_config(const nlohmann::json& j);
SuiteConfig load_config(const std::filesystem::path& path);

struct EntryResult {
  std::string id;
  std::string suite;
  CheckReport report;
};

nlohmann::json to_json(const EntryResult& r);
EntryResult entry_result_from_json(const nlohmann::json& j);

struct RunResult {
  // Run-wide checks under the id "_global" first, then by entry id, suite and check order.
  std::vector<EntryResult> results;
  std::size_t failures = 0;
  int exit_code() const { return failures == 0 ? 0 : 1; }
};

/// Runs every selected suite on every entry. Exceptions inside one check are
/// recorded as a failed report for that check and never abort the run.
RunResult run_suite(const SuiteConfig& config, const std::vector<CorpusEntry>& corpus);

/// One JSON object per line, in result order.
std::string render_jsonl(const std::vector<EntryResult>& results);
std::string render_csv(const std::vector<EntryResult>& results);
/// Writes report.jsonl and summary.csv into dir (created when missing).
void write_reports(const RunResult& run, const std::filesystem::path& dir);

/// Reads a report.jsonl. Throws IOFailure on unreadable or corrupt input.
std::vector<EntryResult> load_report(const std::filesystem::path& path);

struct BaselineValue {
  std::string id;
  std::string suite;
  std::string check;
  std::size_t occurrence = 0;  // index among equal (id, suite, check) triples
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  double error_estimate = 0.0;
};

nlohmann::json baseline_json(const std::vector<EntryResult>& results);
/// Writes the baseline for a report file. Throws IOFailure.
void emit_baseline(const std::filesystem::path& report, const std::filesystem::path& out);
/// Throws IOFailure on unreadable or corrupt input.
std::vector<BaselineValue> load_baseline(const std::filesystem::path& path);

struct Drift {
  std::string id;
  std::string suite;
  std::string check;
  double baseline_lhs = 0.0;
  double current_lhs = 0.0;
  double baseline_rhs = 0.0;
  double current_rhs = 0.0;
  double allowed = 0.0;
  std::string note;  // "missing" or "new" when a check appears on one side only
};

/// A value drifts when |current - baseline| exceeds
/// max(tolerance, error estimates of both runs, 1e-12 * max(1, |baseline|))
/// for lhs or rhs.
std::vector<Drift> compare_to_baseline(const std::vector<BaselineValue>& baseline,
                                       const std::vector<EntryResult>& results);
nlohmann::json to_json(const Drift& d);

}  // namespace gaussig
