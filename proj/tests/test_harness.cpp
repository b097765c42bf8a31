#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gaussig/error.hpp"
#include "gaussig/expr_json.hpp"
#include "gaussig/harness.hpp"

using namespace gaussig;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures = GAUSSIG_FIXTURE_DIR;
const Expr x = Expr::coordinate(0);

json entry(const std::string& id, const Expr& f, std::size_t dim = 1) {
  return {{"id", id}, {"dimension", dim}, {"function", expr_to_json(f)}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gaussig-harness-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Two cheap one-dimensional entries; enough to exercise every code path.
std::vector<CorpusEntry> small_corpus() {
  return parse_corpus(json{{"entries", {entry("tanh", tanh(x)), entry("square", x * x)}}});
}

SuiteConfig small_config() { return parse_config(json{{"suites", {"orlicz", "sobolev"}}, {"seed", 3}}); }

std::vector<BaselineValue> baseline_of(const RunResult& run, const std::string& name) {
  const auto dir = scratch(name);
  write_reports(run, dir);
  emit_baseline(dir / "report.jsonl", dir / "baseline.json");
  return load_baseline(dir / "baseline.json");
}

TEST(Corpus, ParsesAndRejects) {
  const auto c = parse_corpus(json{{"entries",
                                    {entry("a", x), json{{"id", "b"},
                                                         {"dimension", 2},
                                                         {"function", expr_to_json(x)},
                                                         {"metadata", {{"density", false}, {"tags", {"t"}}}}}}}});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].dimension, 2u);
  EXPECT_EQ(c[1].tags, std::vector<std::string>{"t"});
  EXPECT_THROW(parse_corpus(json{{"entries", {entry("a", x), entry("a", x)}}}), ConfigError);
  EXPECT_THROW(parse_corpus(json{{"entries", {entry("a", x * Expr::coordinate(1), 1)}}}), ConfigError);
  EXPECT_THROW(parse_corpus(json{{"entries", {json{{"id", "a"}, {"dimension", 1}}}}}), ConfigError);
  EXPECT_THROW(load_corpus(kFixtures / "does_not_exist.json"), IOFailure);
  EXPECT_TRUE(load_corpus(kFixtures / "empty_corpus.json").empty());
}

TEST(Config, ParsesAndRejects) {
  const SuiteConfig c = parse_config(
      json{{"suites", {"entropy"}}, {"quadrature", {{"order", 32}}}, {"tolerances", {{"inequality", 1e-5}}}});
  ASSERT_EQ(c.suites.size(), 1u);
  EXPECT_EQ(c.suites[0], Suite::Entropy);
  EXPECT_EQ(c.spec_for(1).order, 32u);
  EXPECT_EQ(c.inequality_tolerance, 1e-5);
  EXPECT_EQ(parse_config(json::object()).suites.size(), all_suites().size());
  EXPECT_THROW(parse_config(json{{"suites", {"astrology"}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"colour", "blue"}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"tolerances", {{"identity", -1.0}}}}), ConfigError);
  EXPECT_THROW(load_config(kFixtures / "malformed_config.json"), ConfigError);
  for (Suite s : all_suites()) EXPECT_EQ(suite_from_name(suite_name(s)), s);
}

TEST(Run, OrderedDeterministicAndRoundTrips) {
  const auto corpus = small_corpus();
  const RunResult a = run_suite(small_config(), corpus);
  const RunResult b = run_suite(small_config(), corpus);
  EXPECT_EQ(a.failures, 0u);
  EXPECT_EQ(a.exit_code(), 0);
  ASSERT_FALSE(a.results.empty());
  const std::string ja = render_jsonl(a.results);
  EXPECT_EQ(ja, render_jsonl(b.results));
  EXPECT_EQ(render_csv(a.results), render_csv(b.results));
  // Run-wide checks lead, then entries sorted by id.
  EXPECT_EQ(a.results.front().id, "_global");
  EXPECT_EQ(a.results.back().id, "tanh");
  for (std::size_t i = 1; i < a.results.size(); ++i) EXPECT_LE(a.results[i - 1].id, a.results[i].id);
  std::set<std::string> suites;
  for (const auto& r : a.results) suites.insert(r.suite);
  EXPECT_EQ(suites, (std::set<std::string>{"orlicz", "sobolev"}));

  const auto dir = scratch("roundtrip");
  write_reports(a, dir);
  const auto back = load_report(dir / "report.jsonl");
  EXPECT_EQ(render_jsonl(back), ja);
  std::ifstream csv(dir / "summary.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_FALSE(header.empty());
}

TEST(Run, FailuresAreRecordedNotThrown) {
  const auto corpus = load_corpus(kFixtures / "exp_square_corpus.json");
  const RunResult r = run_suite(load_config(kFixtures / "orlicz_config.json"), corpus);
  EXPECT_GT(r.failures, 0u);
  EXPECT_EQ(r.exit_code(), 1);
  for (const auto& e : r.results) {
    if (!e.report.pass) EXPECT_EQ(e.id, "exp_square");
  }
}

TEST(Baseline, ZeroDriftAgainstItself) {
  const RunResult a = run_suite(small_config(), small_corpus());
  const auto dir = scratch("baseline");
  write_reports(a, dir);
  emit_baseline(dir / "report.jsonl", dir / "baseline.json");
  const auto base = load_baseline(dir / "baseline.json");
  EXPECT_EQ(base.size(), a.results.size());
  EXPECT_TRUE(compare_to_baseline(base, a.results).empty());
  EXPECT_THROW(load_baseline(kFixtures / "corrupt_baseline.json"), IOFailure);
  EXPECT_THROW(load_baseline(dir / "missing.json"), IOFailure);
}

// Doubling the Gauss-Hermite order moves values by less than the error each
// run reports, so no drift is flagged.
TEST(Baseline, RefinedOrderStaysWithinErrorEstimates) {
  const auto corpus = small_corpus();
  SuiteConfig coarse = small_config();
  coarse.order = 64;
  SuiteConfig fine = small_config();
  fine.order = 128;
  const RunResult a = run_suite(coarse, corpus);
  const auto base = baseline_of(a, "refined");
  const auto drift = compare_to_baseline(base, run_suite(fine, corpus).results);
  for (const auto& d : drift) ADD_FAILURE() << to_json(d).dump();
}

TEST(Baseline, MissingAndNewChecksAreReported) {
  const RunResult a = run_suite(small_config(), small_corpus());
  const auto base = baseline_of(a, "missing");
  std::vector<EntryResult> fewer(a.results.begin() + 1, a.results.end());
  const auto drift = compare_to_baseline(base, fewer);
  ASSERT_EQ(drift.size(), 1u);
  EXPECT_EQ(drift[0].note, "missing");
}

}  // namespace
