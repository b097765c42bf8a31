#include "gaussig/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "gaussig/entropy.hpp"
#include "gaussig/error.hpp"
#include "gaussig/orlicz.hpp"
#include "gaussig/sampling.hpp"

namespace gaussig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntegralResult expect_or_diverge(const Field& f, const QuadratureSpec& spec, const char* what) {
  try {
    return gauss_expect(f, spec);
  } catch (const NonFinite& e) {
    throw NoConvergence(std::string(what) + ": " + e.what(), kInf, kInf);
  }
}

// Converged value, else the finiteness surrogate; nullopt when divergent.
std::optional<IntegralResult> finite_expect(const Field& f, const QuadratureSpec& spec) {
  if (auto r = try_gauss_expect(f, spec, Tolerance::precise())) return r;
  return std::nullopt;
}

std::string join(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + ")";
}

}  // namespace

SufficientStatistic make_statistic(const Expr& u, std::size_t dim, const QuadratureSpec& spec) {
  if (u.arity() > dim) throw DimensionMismatch("statistic reads more coordinates than the dimension");
  return {u, gauss_expect(to_field(u, dim), spec).value, dim};
}

IntegralResult partition(const Expr& U, const QuadratureSpec& spec) {
  return expect_or_diverge(to_field(exp(U), spec.dimension), spec, "partition functional diverges");
}

IntegralResult partition(const SufficientStatistic& U, const QuadratureSpec& spec) {
  return partition(U.centered(), spec);
}

IntegralResult cumulant(const Expr& U, const QuadratureSpec& spec) {
  IntegralResult z = partition(U, spec);
  const double z_value = z.value;
  z.value = std::log(z_value);
  z.error_estimate /= z_value;
  return z;
}

IntegralResult cumulant(const SufficientStatistic& U, const QuadratureSpec& spec) {
  return cumulant(U.centered(), spec);
}

GaussDensity patch(const SufficientStatistic& U, const QuadratureSpec& spec) {
  const IntegralResult k = cumulant(U, spec);
  GaussDensity p{U, k.value, k.error_estimate};
  const double mass = gauss_expect(p.field(), spec).value;
  if (std::fabs(mass - 1.0) > std::max(1e-8, 10.0 * k.error_estimate)) {
    throw NotADensity("patch is not normalized: E_M[p] = " + format_number(mass));
  }
  return p;
}

SufficientStatistic chart(const Expr& p, std::size_t dim, const QuadratureSpec& spec) {
  return make_statistic(log(p), dim, spec);
}

SufficientStatistic chart(const GaussDensity& p, const QuadratureSpec& spec) {
  return chart(p.expr(), p.U.dim, spec);
}

SufficientStatistic chart_at(const GaussDensity& f, const GaussDensity& g, const QuadratureSpec& spec) {
  if (f.U.dim != g.U.dim) throw DimensionMismatch("densities live in different dimensions");
  const Expr log_ratio = (g.U.centered() - g.K) - (f.U.centered() - f.K);
  const double mean = gauss_expect(to_field(f.expr() * log_ratio, f.U.dim), spec).value;
  return {log_ratio, mean, f.U.dim};
}

CheckReport patch_derivative_check(const Expr& U, const Expr& H, std::size_t dim, const QuadratureSpec& spec,
                                   double eps) {
  auto density = [&](const Expr& V) { return exp(V - cumulant(V, spec).value); };
  const Expr p0 = density(U);
  const double mean_h = gauss_expect(to_field(p0 * H, dim), spec).value;
  const Expr formula = p0 * (H - mean_h);

  auto discrepancy = [&](double e) {
    const Expr central = (1.0 / (2.0 * e)) * (density(U + e * H) - density(U - e * H));
    return luxemburg_norm(to_field(central - formula, dim), YoungKind::CoshConj, spec).value;
  };
  const double d1 = discrepancy(eps);
  const double d2 = discrepancy(0.5 * eps);

  std::ostringstream note;
  note << "discrepancy at eps: " << format_number(d1) << ", at eps/2: " << format_number(d2);
  if (d1 < 1e-9 && d2 < 1e-9) return make_verdict("patch_derivative", true, note.str());
  const double ratio = d1 / d2;
  return combine("patch_derivative",
                 {make_le("patch_derivative.ratio_low", 1.7, ratio, 0.0, note.str()),
                  make_le("patch_derivative.ratio_high", ratio, 4.3, 0.0, note.str())},
                 note.str());
}

std::vector<AlphaVerdict> domain_alpha_scan(const Expr& U, std::size_t dim, const QuadratureSpec& spec) {
  std::vector<AlphaVerdict> out;
  for (double alpha : {1.05, 1.25, 1.5, 2.0, 4.0}) {
    const auto up = try_gauss_expect(to_field(exp(alpha * U), dim), spec);
    const auto down = up ? try_gauss_expect(to_field(exp(-alpha * U), dim), spec) : std::nullopt;
    out.push_back({alpha, up.has_value() && down.has_value()});
  }
  return out;
}

CheckReport domain_membership(const Expr& U, std::size_t dim, const QuadratureSpec& spec) {
  const auto scan = domain_alpha_scan(U, dim, spec);
  double best = 0.0;
  std::string note = "finite at alpha:";
  for (const auto& v : scan) {
    if (v.converged) {
      best = std::max(best, v.alpha);
      note += " " + format_number(v.alpha);
    }
  }
  if (best == 0.0) note += " none";
  return make_verdict("domain_membership", best > 1.0, note);
}

CheckReport partition_bound_check(const Expr& U, std::size_t dim, const QuadratureSpec& spec) {
  double norm = kInf;
  try {
    norm = luxemburg_norm(to_field(U, dim), YoungKind::CoshMinusOne, spec).value;
  } catch (const NoConvergence&) {
  }
  if (!(norm < 1.0)) {
    return make_verdict("partition_bound", true, "vacuous: ||U||_exp = " + format_number(norm) + " >= 1");
  }
  const IntegralResult z = partition(U, spec);
  return make_le("partition_bound", z.value, 4.0, 1e-9, "||U||_exp = " + format_number(norm), z.error_estimate);
}

CheckReport moment_membership(const Field& p_in, int n1, int n2, const QuadratureSpec& spec, std::size_t statistics,
                              std::uint64_t seed) {
  if (n1 <= 2 || n2 <= 2) throw DomainError("moment orders must exceed 2");
  const double z = density_normalizer(p_in, spec);
  if (!(std::fabs(z - 1.0) <= 0.01)) throw NotADensity("E_M[p] = " + format_number(z) + " is not within 1% of 1");
  Field p = (1.0 / z) * p_in;
  if (p.dim() == 1) p = p.with_breakpoints(zeros_1d(p));
  p = memoize(p);

  const double q1 = n1 / (n1 - 1.0);
  const double q2 = -1.0 / (n2 - 1.0);
  const double b1 = std::pow(2.0, q1);
  const double b2 = std::pow(2.0, n2 / (n2 - 1.0));
  auto moment = [&](double q) {
    return finite_expect(map(p, [q](double v) {
                           if (v < 0.0) throw DomainError("density takes a negative value");
                           return std::pow(v, q);
                         }),
                         spec);
  };
  const auto m1 = moment(q1);
  const auto m2 = moment(q2);
  const std::string pair = "n1 = " + std::to_string(n1) + ", n2 = " + std::to_string(n2);
  std::vector<CheckReport> parts{
      make_le("moment.upper", m1 ? m1->value : kInf, b1, 1e-6 + (m1 ? m1->error_estimate : 0.0), pair,
              m1 ? m1->error_estimate : 0.0),
      make_le("moment.lower", m2 ? m2->value : kInf, b2, 1e-6 + (m2 ? m2->error_estimate : 0.0), pair,
              m2 ? m2->error_estimate : 0.0)};
  if (!parts[0].pass || !parts[1].pass) return combine("moment_membership", parts, pair);

  Rng rng(seed);
  const std::size_t dim = p.dim();
  const double up = std::pow(2.0, n1), down = std::pow(2.0, n2);
  for (std::size_t s = 0; s < statistics; ++s) {
    Expr U = random_polynomial(rng, dim, 1, 1.0);
    const double c = uniform(rng, -0.1, 0.1);
    for (std::size_t j = 0; j < dim; ++j) U = U + c * hermite(2, j);
    const Field Uf = to_field(U, dim);
    const double under_m = luxemburg_norm(Uf, YoungKind::CoshMinusOne, spec).value;
    const double under_p = luxemburg_norm(Uf, YoungKind::CoshMinusOne, spec, &p).value;
    const std::string tag = "statistic " + std::to_string(s);
    parts.push_back(make_le("norm_bound.p_by_m", under_p, up * under_m, 1e-6 * up * under_m, tag));
    parts.push_back(make_le("norm_bound.m_by_p", under_m, down * under_p, 1e-6 * down * under_p, tag));
  }
  return combine("moment_membership", parts, pair);
}

CheckReport moment_membership_search(const Field& p, const QuadratureSpec& spec, std::size_t statistics,
                                     std::uint64_t seed) {
  CheckReport last;
  for (int n1 = 3; n1 <= 8; ++n1) {
    for (int n2 = 3; n2 <= 8; ++n2) {
      last = moment_membership(p, n1, n2, spec, 0, seed);
      if (last.pass) return moment_membership(p, n1, n2, spec, statistics, seed);
    }
  }
  return last;
}

Expr ExpFamily::combination() const {
  Expr sum = Expr::constant(0.0);
  for (std::size_t j = 0; j < stats.size(); ++j) sum = sum + theta[j] * stats[j].centered();
  return sum;
}

ExpFamily exp_family(const std::vector<SufficientStatistic>& stats, const std::vector<double>& theta,
                     const QuadratureSpec& spec) {
  if (stats.size() != theta.size()) throw DimensionMismatch("theta and statistics differ in length");
  ExpFamily fam{stats, theta, 0.0, 0.0};
  const IntegralResult k = cumulant(fam.combination(), spec);
  fam.psi = k.value;
  fam.psi_error = k.error_estimate;
  return fam;
}

double variation_distance(const Field& p, const Field& q, const QuadratureSpec& spec) {
  Field d = zip(p, q, [](double a, double b) { return std::fabs(a - b); });
  if (d.dim() == 1) {
    const auto crossings = zeros_1d(p - q);
    // Identical or nearly identical inputs vanish on whole stretches; no split helps there.
    if (crossings.size() <= 64) d = d.with_breakpoints(crossings);
  }
  return gauss_expect(d, spec).value;
}

double variation_distance(const Expr& p, const Expr& q, std::size_t dim, const QuadratureSpec& spec) {
  return variation_distance(to_field(p, dim), to_field(q, dim), spec);
}

std::vector<CheckReport> mollified_family_approx(const std::vector<SufficientStatistic>& stats, double alpha,
                                                 const std::vector<int>& k_list, const QuadratureSpec& spec,
                                                 std::vector<std::vector<double>> thetas) {
  if (stats.empty() || k_list.empty()) throw DomainError("family approximation needs statistics and k values");
  const std::size_t m = stats.size();
  const std::size_t dim = stats.front().dim;
  if (thetas.empty()) {
    const double step = alpha / (2.0 * static_cast<double>(m));
    std::size_t total = 1;
    for (std::size_t j = 0; j < m; ++j) total *= 3;
    for (std::size_t t = 0; t < total; ++t) {
      std::vector<double> th(m);
      std::size_t code = t;
      for (std::size_t j = 0; j < m; ++j, code /= 3) th[j] = (static_cast<double>(code % 3) - 1.0) * step;
      thetas.push_back(th);
    }
  }

  // The smoothed statistics depend only on k.
  std::vector<std::vector<Field>> smoothed;
  for (int k : k_list) {
    const double R = 2.0 * k, lambda = 1.0 / R;
    std::vector<Field> row;
    for (const auto& s : stats) row.push_back(memoize(mollify(s.centered() * radial_cutoff(R, dim), dim, lambda)));
    smoothed.push_back(std::move(row));
  }

  std::vector<CheckReport> out;
  for (const auto& th : thetas) {
    double l1 = 0.0;
    for (double t : th) l1 += std::fabs(t);
    if (!(l1 < alpha)) throw DomainError("theta outside the ball sum |theta_j| < alpha");
    const ExpFamily target = exp_family(stats, th, spec);
    const Field p = to_field(target.density(), dim);

    std::vector<double> dist;
    for (const auto& row : smoothed) {
      Field s = constant_field(0.0, dim);
      for (std::size_t j = 0; j < m; ++j) s = s + th[j] * row[j];
      const Field es = memoize(map(s, [](double v) { return std::exp(v); }));
      const double zk = expect_or_diverge(es, spec, "smoothed family partition diverges").value;
      dist.push_back(variation_distance(p, (1.0 / zk) * es, spec));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < dist.size(); ++i) monotone = monotone && dist[i] <= dist[i - 1] + 1e-6;
    const std::string note = "theta = " + join(th) + ", distances " + join(dist);
    CheckReport r = make_le("family_approx.final", dist.back(), 0.05, 0.0, note);
    if (!monotone) r = combine("family_approx", {r, make_verdict("family_approx.monotone", false, note)}, note);
    r.name = "family_approx";
    out.push_back(r);
  }
  return out;
}

double bundle_inner(const GaussDensity& p, const Expr& U, const Expr& V, const QuadratureSpec& spec) {
  const std::size_t dim = p.U.dim;
  const Expr pe = p.expr();
  const double mu = gauss_expect(to_field(pe * U, dim), spec).value;
  const double mv = gauss_expect(to_field(pe * V, dim), spec).value;
  return gauss_expect(to_field(pe * (U - mu) * (V - mv), dim), spec).value;
}

namespace {

struct DiffeoBounds {
  double alpha;  // 1 / sup chi'^2
  double beta;   // inf chi'^2
};

DiffeoBounds probe_diffeo(const Expr& chi, const Expr& dchi) {
  constexpr std::size_t kGrid = 4001;
  constexpr double kBound = 40.0;
  double lo = kInf, hi = 0.0, prev = -kInf;
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double x = -kBound + 2.0 * kBound * static_cast<double>(i) / (kGrid - 1);
    const double d = dchi({x});
    const double c = chi({x});
    if (!(d > 0.0) || !(c > prev)) throw NotMonotone("map is not strictly increasing near x = " + format_number(x));
    prev = c;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {1.0 / (hi * hi), lo * lo};
}

double eps_recipe(double a) { return a < 1.0 ? a / (2.0 * (1.0 - a)) : 1.0; }

// log q for q = M(chi^{-1}) (chi^{-1})' / M.
Field log_image_density(const Expr& chi, const Expr& dchi) {
  return Field(1, [chi, dchi](const double* xs, std::size_t count, double* out) {
    for (std::size_t i = 0; i < count; ++i) {
      const double x = xs[i];
      auto g = [&](double y) { return chi({y}) - x; };
      double lo = -1.0, hi = 1.0;
      for (int k = 0; k < 1100 && g(lo) > 0.0; ++k) lo *= 2.0;
      for (int k = 0; k < 1100 && g(hi) < 0.0; ++k) hi *= 2.0;
      std::uintmax_t iters = 200;
      const auto bracket =
          boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
      const double y = 0.5 * (bracket.first + bracket.second);
      out[i] = -0.5 * y * y + 0.5 * x * x - std::log(dchi({y}));
    }
  });
}

}  // namespace

Field diffeo_image_density(const Expr& chi) {
  if (chi.arity() > 1) throw DimensionMismatch("image densities are supported on the line only");
  const Expr dchi = derivative(chi, 0);
  probe_diffeo(chi, dchi);
  return map(log_image_density(chi, dchi), [](double v) { return std::exp(v); });
}

CheckReport diffeo_image_density_1d(const Expr& chi) {
  if (chi.arity() > 1) throw DimensionMismatch("image densities are supported on the line only");
  const Expr dchi = derivative(chi, 0);
  const DiffeoBounds b = probe_diffeo(chi, dchi);
  const double eps = std::min(eps_recipe(b.alpha), eps_recipe(b.beta));
  const Field logq = memoize(log_image_density(chi, dchi));
  // The line is handled by the piecewise rule: q may grow like a Gaussian of
  // larger variance, which Gauss-Hermite nodes resolve poorly.
  const QuadratureSpec line = QuadratureSpec::piecewise();

  auto power = [&](double s) { return map(logq, [s](double v) { return std::exp(s * v); }); };
  const auto mass = try_gauss_expect(power(1.0), line, Tolerance::precise());
  const auto up = try_gauss_expect(power(1.0 + eps), line, Tolerance::finiteness());
  const auto down = try_gauss_expect(power(-eps), line, Tolerance::finiteness());

  std::ostringstream note;
  note << "alpha = " << format_number(b.alpha) << ", beta = " << format_number(b.beta)
       << ", eps = " << format_number(eps);
  std::vector<CheckReport> parts{
      make_eq("image_density.mass", mass ? mass->value : kInf, 1.0, 1e-6, note.str()),
      make_verdict("image_density.upper_moment", up.has_value(),
                   "E_M[q^(1+eps)] = " + format_number(up ? up->value : kInf)),
      make_verdict("image_density.lower_moment", down.has_value(),
                   "E_M[q^(-eps)] = " + format_number(down ? down->value : kInf))};
  return combine("diffeo_image_density", parts, note.str());
}

}  // namespace gaussig
