#include "gaussig/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gaussig/entropy.hpp"
#include "gaussig/error.hpp"
#include "gaussig/expr_json.hpp"
#include "gaussig/manifold.hpp"
#include "gaussig/orlicz.hpp"
#include "gaussig/sobolev.hpp"
#include "gaussig/translation_ou.hpp"

namespace gaussig {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOFailure("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write " + path.string());
  out << text;
  if (!out) throw IOFailure("write failed for " + path.string());
}

json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

CorpusEntry parse_entry(const json& j) {
  if (!j.is_object()) throw ConfigError("corpus entry must be an object");
  reject_unknown_keys(j, {"id", "function", "dimension", "metadata"}, "corpus entry");
  CorpusEntry e;
  try {
    e.id = j.at("id").get<std::string>();
    e.dimension = j.at("dimension").get<std::size_t>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("corpus entry: ") + ex.what());
  }
  if (e.id.empty()) throw ConfigError("corpus entry id is empty");
  if (e.dimension == 0) throw ConfigError("entry " + e.id + ": dimension must be positive");
  if (!j.contains("function")) throw ConfigError("entry " + e.id + ": missing function");
  e.function = expr_from_json(j.at("function"));
  if (e.function.arity() > e.dimension) {
    throw ConfigError("entry " + e.id + ": expression reads " + std::to_string(e.function.arity()) +
                      " coordinates but dimension is " + std::to_string(e.dimension));
  }
  if (j.contains("metadata")) {
    const json& m = j.at("metadata");
    if (!m.is_object()) throw ConfigError("entry " + e.id + ": metadata must be an object");
    reject_unknown_keys(m, {"lipschitz_bound", "density", "in_domain_hint", "exp_class", "tags"},
                        "metadata of " + e.id);
    try {
      if (m.contains("lipschitz_bound")) e.lipschitz_bound = m.at("lipschitz_bound").get<double>();
      e.density = m.value("density", false);
      e.in_domain_hint = m.value("in_domain_hint", false);
      if (m.contains("exp_class")) e.exp_class = m.at("exp_class").get<bool>();
      if (m.contains("tags")) e.tags = m.at("tags").get<std::vector<std::string>>();
    } catch (const json::exception& ex) {
      throw ConfigError("metadata of " + e.id + ": " + ex.what());
    }
  }
  return e;
}

}  // namespace

std::vector<CorpusEntry> parse_corpus(const json& j) {
  const json* list = &j;
  if (j.is_object()) {
    reject_unknown_keys(j, {"entries", "description"}, "corpus");
    if (!j.contains("entries")) throw ConfigError("corpus has no \"entries\"");
    list = &j.at("entries");
  }
  if (!list->is_array()) throw ConfigError("corpus entries must be an array");
  std::vector<CorpusEntry> out;
  std::set<std::string> seen;
  for (const json& item : *list) {
    CorpusEntry e = parse_entry(item);
    if (!seen.insert(e.id).second) throw ConfigError("duplicate corpus id \"" + e.id + "\"");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) { return parse_corpus(parse_json_file(path)); }

std::string suite_name(Suite s) {
  switch (s) {
    case Suite::Orlicz: return "orlicz";
    case Suite::Entropy: return "entropy";
    case Suite::Manifold: return "manifold";
    case Suite::TranslationOU: return "translation-ou";
    case Suite::Sobolev: return "sobolev";
  }
  return "?";
}

Suite suite_from_name(const std::string& s) {
  for (Suite x : all_suites()) {
    if (suite_name(x) == s) return x;
  }
  throw ConfigError("unknown suite \"" + s + "\"");
}

std::vector<Suite> all_suites() {
  return {Suite::Orlicz, Suite::Entropy, Suite::Manifold, Suite::TranslationOU, Suite::Sobolev};
}

QuadratureSpec SuiteConfig::spec_for(std::size_t dim) const {
  const Scheme s = scheme.value_or(dim <= 4 ? Scheme::GaussHermite : Scheme::Qmc);
  switch (s) {
    case Scheme::GaussHermite: return QuadratureSpec::gauss_hermite(dim, order);
    case Scheme::Qmc: return QuadratureSpec::qmc(dim, samples, seed);
    case Scheme::Piecewise1d:
      if (dim == 1) return QuadratureSpec::piecewise();
      return QuadratureSpec::for_dimension(dim, seed);
  }
  return QuadratureSpec::for_dimension(dim, seed);
}

SuiteConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be an object");
  reject_unknown_keys(j, {"suites", "quadrature", "tolerances", "output", "seed", "threads"}, "config");
  SuiteConfig c;
  try {
    if (j.contains("suites")) {
      c.suites.clear();
      for (const auto& s : j.at("suites")) c.suites.push_back(suite_from_name(s.get<std::string>()));
    }
    if (j.contains("quadrature")) {
      const json& q = j.at("quadrature");
      reject_unknown_keys(q, {"scheme", "order", "samples"}, "quadrature");
      if (q.contains("scheme")) {
        const std::string name = q.at("scheme").get<std::string>();
        if (name == "auto") c.scheme.reset();
        else if (name == "gauss_hermite") c.scheme = Scheme::GaussHermite;
        else if (name == "qmc") c.scheme = Scheme::Qmc;
        else if (name == "piecewise") c.scheme = Scheme::Piecewise1d;
        else throw ConfigError("unknown quadrature scheme \"" + name + "\"");
      }
      c.order = q.value("order", c.order);
      c.samples = q.value("samples", c.samples);
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      reject_unknown_keys(t, {"identity", "inequality"}, "tolerances");
      c.identity_tolerance = t.value("identity", c.identity_tolerance);
      c.inequality_tolerance = t.value("inequality", c.inequality_tolerance);
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      reject_unknown_keys(o, {"dir"}, "output");
      if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
    }
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.identity_tolerance > 0.0) || !(c.inequality_tolerance > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (c.samples == 0) throw ConfigError("quadrature samples must be positive");
  if (c.order == 1) throw ConfigError("Gauss-Hermite order must be at least 2");
  return c;
}

SuiteConfig load_config(const std::filesystem::path& path) { return parse_config(parse_json_file(path)); }

json to_json(const EntryResult& r) {
  json j = to_json(r.report);
  j["id"] = r.id;
  j["suite"] = r.suite;
  return j;
}

EntryResult entry_result_from_json(const json& j) {
  try {
    return {j.at("id").get<std::string>(), j.at("suite").get<std::string>(), check_from_json(j)};
  } catch (const json::exception& e) {
    throw IOFailure(std::string("malformed report record: ") + e.what());
  }
}

// ------------------------------------------------------------------ suites

namespace {

std::vector<std::vector<double>> probe_points(std::size_t dim) {
  const double pattern[] = {-1.5, 0.3, 2.0, -0.7};
  std::vector<std::vector<double>> pts(3, std::vector<double>(dim));
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < dim; ++j) pts[k][j] = pattern[(k + j) % 4];
  }
  return pts;
}

std::vector<double> unit(std::size_t dim, double scale = 1.0) {
  std::vector<double> h(dim, 0.0);
  h[0] = scale;
  return h;
}

bool has_tag(const CorpusEntry& e, const std::string& tag) {
  return std::find(e.tags.begin(), e.tags.end(), tag) != e.tags.end();
}

class EntryRunner {
 public:
  EntryRunner(std::string id, const SuiteConfig& config, std::vector<EntryResult>& out)
      : id_(std::move(id)), config_(config), out_(out) {}

  void suite(Suite s) { suite_ = suite_name(s); }

  void add(const std::string& name, const std::function<CheckReport()>& fn) {
    CheckReport r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = make_verdict(name, false, std::string("error: ") + e.what());
    }
    r.name = name;
    out_.push_back({id_, suite_, std::move(r)});
  }

  const SuiteConfig& config() const { return config_; }

 private:
  std::string id_;
  std::string suite_;
  const SuiteConfig& config_;
  std::vector<EntryResult>& out_;
};

CheckReport norm_identity(const Expr& f, std::size_t dim, YoungKind y, const QuadratureSpec& spec, double tol) {
  const LuxemburgNorm n = luxemburg_norm(to_field(f, dim), y, spec);
  if (n.value == 0.0) return make_verdict("norm", true, "zero function");
  return make_eq("norm", n.modular_at_value, 1.0, tol, "||f|| = " + format_number(n.value), n.error_estimate);
}

void orlicz_suite(const CorpusEntry& e, const QuadratureSpec& spec, EntryRunner& run) {
  const double tol = run.config().inequality_tolerance;
  // Densities are checked in the mixture space only; most of them (tilts,
  // for instance) are not in the exponential space.
  run.add("mixture_norm", [&] { return norm_identity(e.function, e.dimension, YoungKind::CoshConj, spec, tol); });
  run.add("lebesgue_inclusion", [&] { return lebesgue_inclusion_check(e.function, e.dimension, 2.0, 2.0, spec); });
  if (e.density) return;
  run.add("exp_norm", [&] { return norm_identity(e.function, e.dimension, YoungKind::CoshMinusOne, spec, tol); });
  run.add("norm_equivalence", [&] {
    const Field f = to_field(e.function, e.dimension);
    const double lux = luxemburg_norm(f, YoungKind::CoshMinusOne, spec).value;
    const double orl = orlicz_dual_norm(f, YoungKind::CoshMinusOne, spec);
    const std::string note = "Luxemburg " + format_number(lux) + ", Orlicz " + format_number(orl);
    return combine("norm_equivalence", {make_le("lower", lux, orl, tol * std::max(1.0, lux), note),
                                        make_le("upper", orl, 2.0 * lux, tol * std::max(1.0, lux), note)},
                   note);
  });
}

void entropy_suite(const CorpusEntry& e, const QuadratureSpec& spec, EntryRunner& run) {
  if (!e.density) return;
  const double tol = run.config().inequality_tolerance;
  const Field p = to_field(e.function, e.dimension);
  run.add("entropy_membership", [&] { return entropy_membership_check(p, spec); });
  run.add("logplus_bracket", [&] { return logplus_bracket_check(entropy(p, spec), tol); });
  run.add("mixture_split", [&] { return mixture_split_check(p, spec, tol); });
}

void manifold_suite(const CorpusEntry& e, const QuadratureSpec& spec, EntryRunner& run) {
  const std::size_t n = e.dimension;
  if (e.in_domain_hint) {
    run.add("domain_membership", [&] { return domain_membership(e.function, n, spec); });
    run.add("partition_bound", [&] { return partition_bound_check(e.function, n, spec); });
    run.add("patch_derivative", [&] { return patch_derivative_check(e.function, Expr::coordinate(0), n, spec); });
    run.add("chart_roundtrip", [&] {
      const SufficientStatistic U = make_statistic(e.function, n, spec);
      const SufficientStatistic back = chart(patch(U, spec), spec);
      double worst = 0.0;
      for (const auto& x : probe_points(n)) {
        worst = std::max(worst, std::fabs(back.centered()(x) - U.centered()(x)));
      }
      return make_le("chart_roundtrip", worst, 0.0, 1e-8, "sup |s_M(e_M(U)) - U| at probe points");
    });
  }
  if (e.density && n == 1 && has_tag(e, "moment_membership")) {
    run.add("moment_membership", [&] {
      return moment_membership_search(to_field(e.function, n), spec, 5, run.config().seed);
    });
  }
}

void translation_suite(const CorpusEntry& e, const QuadratureSpec& spec, EntryRunner& run) {
  const std::size_t n = e.dimension;
  const Expr& f = e.function;
  const double id_tol = run.config().identity_tolerance;
  const double tol = run.config().inequality_tolerance;
  const auto points = probe_points(n);

  run.add("adjoint_duality", [&] {
    const auto h = unit(n, 0.5);
    return adjoint_duality_check(f, Expr::coordinate(0), h, n, spec, id_tol);
  });
  // Exponential-space statements need f in that space; densities get the
  // mixture-space ones.
  const bool exp_space = !e.density;
  if (exp_space) {
    run.add("translation_norm_bound", [&] {
      const auto h = unit(n, 0.8);
      return translation_norm_bound_check(f, h, n, spec, tol);
    });
  }
  if (e.exp_class) {
    const bool expected = *e.exp_class;
    run.add("exp_class_membership", [&] {
      CheckReport r = exp_class_membership(f, n, {2.0, 4.0, 6.0, 8.0}, spec);
      const bool agrees = r.pass == expected;
      return make_verdict("exp_class_membership", agrees,
                          std::string(expected ? "expected member" : "expected non-member") + "; verdict " +
                              (r.pass ? "member" : "non-member") + "; " + r.note);
    });
    if (expected && n <= 2) {
      run.add("mollifier_convergence", [&] { return mollifier_convergence_check(f, n, {0.4, 0.2, 0.1}, spec); });
    }
  }
  if (exp_space) {
    run.add("ou_contraction.cosh_minus_one",
            [&] { return ou_contraction_check(f, n, YoungKind::CoshMinusOne, 0.5, spec, tol); });
  }
  run.add("ou_contraction.cosh_conj", [&] { return ou_contraction_check(f, n, YoungKind::CoshConj, 0.5, spec, tol); });
  run.add("ou_mean", [&] { return ou_mean_check(f, n, 0.5, spec, tol); });
  run.add("ou_semigroup", [&] { return ou_semigroup_check(f, n, 0.2, 0.3, points, tol); });
  if (exp_space) {
    run.add("mu_translate_norm", [&] { return mu_translate_norm_check(f, n, MuSpec::gaussian(0.25), spec, tol); });
  }

  if (!is_differentiable(f)) return;
  run.add("poincare_mixture", [&] { return poincare_mixture_check(f, n, spec, tol); });
  run.add("covariance_bound", [&] {
    return covariance_bound_check(f, Expr::coordinate(0), n, VectorNormPair::L1Linf, spec, tol);
  });
  bool twice = true;
  try {
    laplacian(f, n);
  } catch (const NotDifferentiable&) {
    twice = false;
  }
  if (twice) run.add("ou_equality", [&] { return ou_equality_check(f, n, points, spec, tol); });
  if (e.lipschitz_bound) {
    run.add("dispersion_bound", [&] { return dispersion_bound_check(f, n, *e.lipschitz_bound, spec, tol); });
  }
}

void sobolev_suite(const CorpusEntry& e, const QuadratureSpec& spec, EntryRunner& run) {
  const std::size_t n = e.dimension;
  const Expr& f = e.function;
  if (!is_differentiable(f)) return;
  const double id_tol = run.config().identity_tolerance;
  const double tol = run.config().inequality_tolerance;
  const auto points = probe_points(n);

  const YoungKind space = e.density ? YoungKind::CoshConj : YoungKind::CoshMinusOne;
  run.add("graph_norm", [&] {
    const double plain = luxemburg_norm(to_field(f, n), space, spec).value;
    const double graph = graph_norm(make_sobolev(f, n), space, spec);
    return make_le("graph_norm", plain, graph, 0.0, young_name(space) + " graph norm " + format_number(graph));
  });
  const std::vector<std::pair<std::string, Expr>> phis = {
      {"1", Expr::constant(1.0)}, {"x0", Expr::coordinate(0)}, {"he2", hermite(2, 0)}};
  for (const auto& [label, phi] : phis) {
    run.add("ibp.d0." + label, [&, phi = phi] { return ibp_check(f, phi, 0, n, spec, tol); });
  }
  if (n >= 2) run.add("ibp.d1.x1", [&] { return ibp_check(f, Expr::coordinate(1), 1, n, spec, tol); });
  run.add("gauss_poincare", [&] { return gauss_poincare_check(f, n, spec, tol); });
  run.add("product_rule", [&] { return product_rule_check(f, Expr::coordinate(0), 0, n, spec, 1e-10); });
  run.add("chain_rule.tanh", [&] { return chain_rule_check(ChainMap::tanh_map(), f, 0, n, spec, 1e-10); });
  run.add("directional_identity", [&] {
    const auto h = unit(n);
    return directional_identity_check(f, h, 0.5, points, spec, id_tol, !e.density);
  });
  if (n <= 2) {
    run.add("mollify_derivative", [&] {
      return mollify_derivative_check(f, 0, n, 0.3, {points[0], points[1]}, 1e-7);
    });
  }
  if (e.in_domain_hint) {
    run.add("exp_weight_derivative",
            [&] { return exp_weight_derivative_check(f, Expr::coordinate(0), 0, n, spec, tol); });
  }
}

void global_checks(const SuiteConfig& config, std::vector<EntryResult>& out) {
  const double tol = config.inequality_tolerance;
  const bool orlicz = std::count(config.suites.begin(), config.suites.end(), Suite::Orlicz) > 0;
  const bool sobolev = std::count(config.suites.begin(), config.suites.end(), Suite::Sobolev) > 0;
  EntryRunner run("_global", config, out);
  if (orlicz) {
    run.suite(Suite::Orlicz);
    const auto grid = logspace(-3.0, 2.0, 41);
    run.add("delta2.a2", [&] { return delta2_check(2.0, grid, tol); });
    run.add("conjugacy_sandwich", [&] { return conjugacy_sandwich_check(grid, tol); });
    run.add("fenchel_young", [&] { return fenchel_young_check(logspace(-2.0, 1.0, 25), logspace(-2.0, 2.0, 25), tol); });
  }
  if (sobolev) {
    run.suite(Suite::Sobolev);
    run.add("hermite_ladder", [] { return hermite_ladder_check(4); });
  }
}

}  // namespace

RunResult run_suite(const SuiteConfig& config, const std::vector<CorpusEntry>& corpus) {
  std::vector<const CorpusEntry*> order;
  for (const auto& e : corpus) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const CorpusEntry* a, const CorpusEntry* b) { return a->id < b->id; });

  std::vector<Suite> suites = config.suites;
  std::sort(suites.begin(), suites.end());
  suites.erase(std::unique(suites.begin(), suites.end()), suites.end());

  // Slot 0 holds the entry-independent checks; slot i + 1 holds entry i. An
  // empty corpus yields an empty report.
  if (order.empty()) return {};
  std::vector<std::vector<EntryResult>> slots(order.size() + 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < slots.size(); k = next++) {
      if (k == 0) {
        global_checks(config, slots[0]);
        continue;
      }
      const CorpusEntry& e = *order[k - 1];
      const QuadratureSpec spec = config.spec_for(e.dimension);
      EntryRunner run(e.id, config, slots[k]);
      for (Suite s : suites) {
        run.suite(s);
        switch (s) {
          case Suite::Orlicz: orlicz_suite(e, spec, run); break;
          case Suite::Entropy: entropy_suite(e, spec, run); break;
          case Suite::Manifold: manifold_suite(e, spec, run); break;
          case Suite::TranslationOU: translation_suite(e, spec, run); break;
          case Suite::Sobolev: sobolev_suite(e, spec, run); break;
        }
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, slots.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunResult out;
  // Entry-independent checks first, then entries by id.
  for (auto& slot : slots) {
    for (auto& r : slot) {
      if (!r.report.pass) ++out.failures;
      out.results.push_back(std::move(r));
    }
  }
  return out;
}

std::string render_jsonl(const std::vector<EntryResult>& results) {
  std::string text;
  for (const auto& r : results) {
    text += to_json(r).dump();
    text += '\n';
  }
  return text;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string render_csv(const std::vector<EntryResult>& results) {
  std::string text = "id,suite,check,pass,lhs,rhs,margin,tolerance,error_estimate\n";
  for (const auto& r : results) {
    const CheckReport& c = r.report;
    text += csv_field(r.id) + ',' + csv_field(r.suite) + ',' + csv_field(c.name) + ',' + (c.pass ? "true" : "false") +
            ',' + format_number(c.lhs) + ',' + format_number(c.rhs) + ',' + format_number(c.margin) + ',' +
            format_number(c.tolerance) + ',' + format_number(c.error_estimate) + '\n';
  }
  return text;
}

void write_reports(const RunResult& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IOFailure("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.jsonl", render_jsonl(run.results));
  write_file(dir / "summary.csv", render_csv(run.results));
}

std::vector<EntryResult> load_report(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<EntryResult> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(entry_result_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw IOFailure(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const IOFailure& e) {
      throw IOFailure(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------- baseline

namespace {

using Key = std::tuple<std::string, std::string, std::string, std::size_t>;

std::vector<BaselineValue> values_of(const std::vector<EntryResult>& results) {
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  std::vector<BaselineValue> out;
  for (const auto& r : results) {
    const auto base = std::make_tuple(r.id, r.suite, r.report.name);
    out.push_back({r.id, r.suite, r.report.name, seen[base]++, r.report.lhs, r.report.rhs, r.report.tolerance,
                   r.report.error_estimate});
  }
  return out;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double from_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw IOFailure("malformed number in baseline: " + j.dump());
}

}  // namespace

json baseline_json(const std::vector<EntryResult>& results) {
  json checks = json::array();
  for (const auto& v : values_of(results)) {
    checks.push_back({{"id", v.id},
                      {"suite", v.suite},
                      {"check", v.check},
                      {"occurrence", v.occurrence},
                      {"lhs", num(v.lhs)},
                      {"rhs", num(v.rhs)},
                      {"tolerance", num(v.tolerance)},
                      {"error_estimate", num(v.error_estimate)}});
  }
  return {{"format", "gaussig-baseline"}, {"version", 1}, {"checks", checks}};
}

void emit_baseline(const std::filesystem::path& report, const std::filesystem::path& out) {
  write_file(out, baseline_json(load_report(report)).dump(1) + "\n");
}

std::vector<BaselineValue> load_baseline(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    const json j = json::parse(text);
    if (!j.is_object() || j.value("format", "") != "gaussig-baseline") {
      throw IOFailure(path.string() + ": not a baseline file");
    }
    if (j.at("version").get<int>() != 1) throw IOFailure(path.string() + ": unsupported baseline version");
    std::vector<BaselineValue> out;
    for (const json& c : j.at("checks")) {
      out.push_back({c.at("id").get<std::string>(), c.at("suite").get<std::string>(), c.at("check").get<std::string>(),
                     c.at("occurrence").get<std::size_t>(), from_num(c.at("lhs")), from_num(c.at("rhs")),
                     from_num(c.at("tolerance")), from_num(c.at("error_estimate"))});
    }
    return out;
  } catch (const json::exception& e) {
    throw IOFailure(path.string() + ": corrupt baseline: " + e.what());
  }
}

std::vector<Drift> compare_to_baseline(const std::vector<BaselineValue>& baseline,
                                       const std::vector<EntryResult>& results) {
  std::map<Key, BaselineValue> before;
  for (const auto& v : baseline) before[{v.id, v.suite, v.check, v.occurrence}] = v;
  std::vector<Drift> out;
  for (const auto& v : values_of(results)) {
    const Key key{v.id, v.suite, v.check, v.occurrence};
    auto it = before.find(key);
    if (it == before.end()) {
      out.push_back({v.id, v.suite, v.check, NAN, v.lhs, NAN, v.rhs, 0.0, "new"});
      continue;
    }
    const BaselineValue& b = it->second;
    auto drifted = [&](double old_v, double new_v, double& allowed) {
      allowed = std::max({b.tolerance, v.tolerance, b.error_estimate + v.error_estimate,
                          1e-12 * std::max(1.0, std::fabs(old_v))});
      if (std::isnan(old_v) && std::isnan(new_v)) return false;
      if (std::isinf(old_v) || std::isinf(new_v)) return old_v != new_v;
      return !(std::fabs(new_v - old_v) <= allowed);
    };
    double allowed_l = 0.0, allowed_r = 0.0;
    const bool dl = drifted(b.lhs, v.lhs, allowed_l);
    const bool dr = drifted(b.rhs, v.rhs, allowed_r);
    if (dl || dr) {
      out.push_back({v.id, v.suite, v.check, b.lhs, v.lhs, b.rhs, v.rhs, std::max(allowed_l, allowed_r),
                     dl ? "lhs drift" : "rhs drift"});
    }
    before.erase(it);
  }
  for (const auto& [key, b] : before) {
    out.push_back({b.id, b.suite, b.check, b.lhs, NAN, b.rhs, NAN, 0.0, "missing"});
  }
  return out;
}

json to_json(const Drift& d) {
  return {{"id", d.id},
          {"suite", d.suite},
          {"check", d.check},
          {"baseline_lhs", num(d.baseline_lhs)},
          {"current_lhs", num(d.current_lhs)},
          {"baseline_rhs", num(d.baseline_rhs)},
          {"current_rhs", num(d.current_rhs)},
          {"allowed", num(d.allowed)},
          {"note", d.note}};
}

}  // namespace gaussig
