// Command-line front end: `verify` runs the check suites over a corpus,
// `baseline` freezes a report's values for later drift comparison.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaussig/error.hpp"
#include "gaussig/harness.hpp"

namespace {

constexpr int kExitConfig = 2;

struct VerifyArgs {
  std::string config;
  std::string corpus;
  std::vector<std::string> suites;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string baseline;
};

int run_verify(const VerifyArgs& args) {
  gaussig::SuiteConfig config = gaussig::load_config(args.config);
  if (!args.suites.empty()) {
    config.suites.clear();
    for (const auto& s : args.suites) config.suites.push_back(gaussig::suite_from_name(s));
  }
  if (!args.out.empty()) config.out_dir = args.out;
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.threads = *args.threads;
  const auto corpus = gaussig::load_corpus(args.corpus);
  std::optional<std::vector<gaussig::BaselineValue>> baseline;
  if (!args.baseline.empty()) baseline = gaussig::load_baseline(args.baseline);

  const gaussig::RunResult run = gaussig::run_suite(config, corpus);
  gaussig::write_reports(run, config.out_dir);

  for (const auto& r : run.results) {
    if (!r.report.pass) std::cout << "FAIL " << r.id << ' ' << r.suite << ' ' << r.report.name << ": " << r.report.note << '\n';
  }
  std::cout << corpus.size() << " entries, " << run.results.size() << " checks, " << run.failures << " failed\n";
  std::cout << "report: " << (config.out_dir / "report.jsonl").string() << '\n';

  int code = run.exit_code();
  if (baseline) {
    const auto drift = gaussig::compare_to_baseline(*baseline, run.results);
    std::string text;
    for (const auto& d : drift) text += gaussig::to_json(d).dump() + "\n";
    std::ofstream out(config.out_dir / "drift.jsonl", std::ios::binary | std::ios::trunc);
    out << text;
    std::cout << "drift: " << drift.size() << " checks outside tolerance\n";
    if (!drift.empty()) code = 1;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian Orlicz-space verification harness"};
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run check suites over a corpus");
  v->add_option("--config", verify.config, "Suite configuration JSON")->required();
  v->add_option("--corpus", verify.corpus, "Corpus JSON")->required();
  v->add_option("--suite", verify.suites, "Restrict to a suite (repeatable)");
  v->add_option("--out", verify.out, "Output directory (overrides the config)");
  v->add_option("--seed", verify.seed, "Seed for QMC streams and random statistics");
  v->add_option("--threads", verify.threads, "Worker threads (0 = all cores)");
  v->add_option("--baseline", verify.baseline, "Compare against a baseline file");

  std::string report, out;
  auto* b = app.add_subcommand("baseline", "Store a report's values as a baseline");
  b->add_option("--report", report, "report.jsonl from a verify run")->required();
  b->add_option("--out", out, "Baseline file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*v) return run_verify(verify);
    gaussig::emit_baseline(report, out);
    std::cout << "baseline written to " << out << '\n';
    return 0;
  } catch (const gaussig::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
  } catch (const gaussig::IOFailure& e) {
    std::cerr << "I/O failure: " << e.what() << '\n';
  }
  return kExitConfig;
}
