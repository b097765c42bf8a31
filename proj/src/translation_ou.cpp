#include "gaussig/translation_ou.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaussig/error.hpp"
#include "gaussig/orlicz.hpp"
#include "gaussig/sampling.hpp"

namespace gaussig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_dim(std::span<const double> h, std::size_t dim) {
  if (h.size() != dim) throw DimensionMismatch("shift has " + std::to_string(h.size()) + " components, expected " +
                                               std::to_string(dim));
}

Expr linear(std::span<const double> h, double offset = 0.0) {
  return Expr::affine(std::vector<double>(h.begin(), h.end()), offset);
}

Expr radius(std::size_t dim) {
  Expr s = Expr::constant(0.0);
  for (std::size_t j = 0; j < dim; ++j) s = s + pow(Expr::coordinate(j), 2);
  return sqrt(s);
}

// Tensor Gauss-Hermite nodes in R^n, coordinate-major, with product weights.
struct TensorRule {
  std::size_t dim = 0;
  std::vector<double> nodes;  // nodes[j * size + k]
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

TensorRule tensor_rule(std::size_t n, std::size_t m) {
  const Rule& r = gauss_hermite_rule(m);
  const std::size_t k = r.nodes.size();
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= k;
  std::vector<std::vector<double>> axis(n);
  TensorRule out;
  out.dim = n;
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t t = 0; t < total; ++t) {
    double w = 1.0;
    for (std::size_t d = 0; d < n; ++d) w *= r.weights[idx[d]];
    if (w >= 1e-300) {
      out.weights.push_back(w);
      for (std::size_t d = 0; d < n; ++d) axis[d].push_back(r.nodes[idx[d]]);
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (++idx[d] < k) break;
      idx[d] = 0;
    }
  }
  for (std::size_t d = 0; d < n; ++d) out.nodes.insert(out.nodes.end(), axis[d].begin(), axis[d].end());
  return out;
}

TensorRule inner_rule(const QuadratureSpec& inner, std::size_t n) {
  if (inner.scheme != Scheme::GaussHermite) throw ConfigError("the inner Gaussian rule must be Gauss-Hermite");
  if (n > 4) throw ConfigError("inner Gauss-Hermite rules are limited to n <= 4");
  return tensor_rule(n, inner.order == 0 ? default_gh_order(n) : inner.order);
}

// x -> E_Y[f(a x + b Y)].
Field gaussian_smooth(const Field& f, double a, double b, const TensorRule& rule) {
  const std::size_t n = f.dim();
  if (b == 0.0 && a == 1.0) return f;
  auto shared = std::make_shared<const TensorRule>(rule);
  return Field(n, [f, a, b, shared, n](const double* coords, std::size_t count, double* out) {
    const TensorRule& r = *shared;
    const std::size_t K = r.size();
    const std::size_t chunk = std::max<std::size_t>(1, (std::size_t{1} << 16) / K);
    std::vector<double> pts, vals;
    for (std::size_t start = 0; start < count; start += chunk) {
      const std::size_t len = std::min(chunk, count - start);
      const std::size_t total = len * K;
      pts.resize(n * total);
      vals.resize(total);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < len; ++i) {
          const double base = a * coords[j * count + start + i];
          double* dst = pts.data() + j * total + i * K;
          const double* y = r.nodes.data() + j * K;
          for (std::size_t k = 0; k < K; ++k) dst[k] = base + b * y[k];
        }
      }
      f.eval(pts.data(), total, vals.data());
      for (std::size_t i = 0; i < len; ++i) {
        const double* v = vals.data() + i * K;
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) s += r.weights[k] * v[k];
        out[start + i] = s;
      }
    }
  });
}

// One-dimensional variant for fields with breakpoints: the y-line is cut where
// a x + b y crosses a breakpoint and each piece gets Gauss-Legendre, so kinks
// do not spoil the inner rule.
Field gaussian_smooth_kinked_1d(const Field& f, double a, double b, std::size_t gl_order = 20) {
  constexpr double kReach = 12.0;
  constexpr std::size_t kPieces = 16;
  const std::vector<double> breaks = f.breakpoints();
  return Field(1, [f, a, b, breaks, gl_order](const double* coords, std::size_t count, double* out) {
    const Rule& gl = gauss_legendre_rule(gl_order);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    std::vector<double> pts, wts, vals, cuts;
    for (std::size_t i = 0; i < count; ++i) {
      const double x = coords[i];
      cuts.clear();
      for (std::size_t k = 0; k <= kPieces; ++k) cuts.push_back(-kReach + 2.0 * kReach * k / kPieces);
      for (double c : breaks) {
        const double y = (c - a * x) / b;
        if (std::fabs(y) < kReach) cuts.push_back(y);
      }
      std::sort(cuts.begin(), cuts.end());
      pts.clear();
      wts.clear();
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        if (hi - lo <= 0.0) continue;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          const double y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[q];
          pts.push_back(a * x + b * y);
          wts.push_back(0.5 * (hi - lo) * gl.weights[q] * norm * std::exp(-0.5 * y * y));
        }
      }
      vals.resize(pts.size());
      f.eval(pts.data(), pts.size(), vals.data());
      double sum = 0.0;
      for (std::size_t q = 0; q < pts.size(); ++q) sum += wts[q] * vals[q];
      out[i] = sum;
    }
  });
}

double point_value(const Field& f, std::span<const double> x) { return f(x); }

// Lines go through the split Gauss-Legendre path: steep but smooth features
// (bumps, sharp sigmoids) need it as much as kinks do.
Field smooth_by(const Field& f, double a, double b, const TensorRule& rule, std::size_t gl_order = 20) {
  if (f.dim() == 1) return gaussian_smooth_kinked_1d(f, a, b, gl_order);
  return gaussian_smooth(f, a, b, rule);
}

}  // namespace

Expr adjoint_translate(const Expr& g, std::span<const double> h) {
  std::vector<double> neg(h.begin(), h.end());
  for (double& v : neg) v = -v;
  const double h2 = dot(h, h);
  if (h2 == 0.0) return g;
  return exp(linear(neg, -0.5 * h2)) * translate(g, neg);
}

CheckReport adjoint_duality_check(const Expr& f, const Expr& g, std::span<const double> h, std::size_t dim,
                                  const QuadratureSpec& spec, double tolerance) {
  require_dim(h, dim);
  const IntegralResult lhs = gauss_expect(to_field(translate(f, h) * g, dim), spec);
  const IntegralResult rhs = gauss_expect(to_field(f * adjoint_translate(g, h), dim), spec);
  const double err = lhs.error_estimate + rhs.error_estimate;
  return make_eq("adjoint_duality", lhs.value, rhs.value, tolerance * std::max(1.0, std::fabs(lhs.value)) + err,
                 "<tau_h f, g> = " + format_number(lhs.value) + ", <f, tau_h^* g> = " + format_number(rhs.value),
                 err);
}

CheckReport translation_norm_bound_check(const Expr& f, std::span<const double> h, std::size_t dim,
                                         const QuadratureSpec& spec, double tolerance) {
  require_dim(h, dim);
  if (std::sqrt(dot(h, h)) > std::sqrt(std::log(2.0)) + 1e-12) {
    throw DomainError("translation norm bound needs |h| <= sqrt(log 2)");
  }
  const double base = luxemburg_norm(to_field(f, dim), YoungKind::CoshMinusOne, spec).value;
  const double moved = luxemburg_norm(to_field(translate(f, h), dim), YoungKind::CoshMinusOne, spec).value;
  const double ratio = base == 0.0 ? (moved == 0.0 ? 0.0 : kInf) : moved / base;
  return make_le("translation_norm_bound", ratio, 2.0, tolerance,
                 "||tau_h f|| = " + format_number(moved) + ", ||f|| = " + format_number(base));
}

CheckReport exp_class_membership(const Expr& f, std::size_t dim, const std::vector<double>& R_list,
                                 const QuadratureSpec& spec) {
  const Field field = to_field(f, dim);
  std::vector<CheckReport> parts;
  std::string finite_at = "modular finite at rho:";
  bool all_finite = true;
  for (double rho : {1.0, 2.0, 4.0, 8.0}) {
    const auto r = try_gauss_expect(map(field, [rho](double v) { return young_eval(YoungKind::CoshMinusOne, rho * v); }),
                                    spec, Tolerance::finiteness());
    if (r) {
      finite_at += " " + format_number(rho);
    } else {
      all_finite = false;
    }
  }
  parts.push_back(make_verdict("exp_class.modular", all_finite, finite_at));

  std::vector<double> tails;
  for (double R : R_list) {
    try {
      tails.push_back(luxemburg_norm(outside_ball(field, R), YoungKind::CoshMinusOne, spec).value);
    } catch (const NoConvergence&) {
      tails.push_back(kInf);
    }
  }
  // Tails of class members decay like 1/R; a positive limit shows up as a flat
  // sequence, so ask for strict decrease and at least a halving overall.
  bool decreasing = !tails.empty() && std::isfinite(tails.front());
  for (std::size_t i = 1; i < tails.size(); ++i) {
    decreasing = decreasing && (tails[i] == 0.0 || tails[i] < tails[i - 1] * (1.0 - 1e-6));
  }
  if (tails.size() >= 2) decreasing = decreasing && tails.back() <= 0.5 * tails.front();
  std::string note = "tail norms:";
  for (double t : tails) note += " " + format_number(t);
  parts.push_back(make_verdict("exp_class.tails", decreasing, note));
  return combine("exp_class_membership", parts);
}

CheckReport mollifier_convergence_check(const Expr& f, std::size_t dim, const std::vector<double>& lambda_list,
                                        const QuadratureSpec& spec) {
  if (lambda_list.empty()) throw DomainError("mollifier scale list is empty");
  const Field field = to_field(f, dim);
  const double base = luxemburg_norm(field, YoungKind::CoshMinusOne, spec).value;
  std::vector<double> gaps;
  for (double lambda : lambda_list) {
    const Field diff = mollify(f, dim, lambda) - field;
    gaps.push_back(luxemburg_norm(diff, YoungKind::CoshMinusOne, spec).value);
  }
  const double slack = 1e-9 * std::max(base, 1e-300);
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) monotone = monotone && gaps[i] <= gaps[i - 1] + slack;
  std::string note = "||f|| = " + format_number(base) + "; gaps:";
  for (double g : gaps) note += " " + format_number(g);
  return combine("mollifier_convergence",
                 {make_verdict("mollifier.monotone", monotone, note),
                  make_le("mollifier.final", gaps.back(), 0.05 * base, slack, note)},
                 note);
}

Field ou_apply(const Field& f, const OUSpec& ou) {
  if (!(ou.t >= 0.0)) throw DomainError("OU time must be nonnegative");
  if (ou.t == 0.0) return f;
  const double a = std::exp(-ou.t);
  const double b = std::sqrt(-std::expm1(-2.0 * ou.t));
  const TensorRule rule = inner_rule(ou.inner, f.dim());
  return smooth_by(f, a, b, rule);
}

Field ou_apply(const Expr& f, std::size_t dim, const OUSpec& ou) { return ou_apply(to_field(f, dim), ou); }

CheckReport ou_semigroup_check(const Expr& f, std::size_t dim, double s, double t,
                               const std::vector<std::vector<double>>& points, double tolerance) {
  const Field base = to_field(f, dim);
  const Field twice = ou_apply(ou_apply(base, {t, QuadratureSpec::gauss_hermite(dim)}), {s, QuadratureSpec::gauss_hermite(dim)});
  const Field once = ou_apply(base, {s + t, QuadratureSpec::gauss_hermite(dim)});
  double worst = 0.0;
  for (const auto& x : points) {
    require_dim(x, dim);
    const double a = twice(x), b = once(x);
    worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(b)));
  }
  return make_le("ou_semigroup", worst, 0.0, tolerance,
                 "s = " + format_number(s) + ", t = " + format_number(t) + ", relative sup gap");
}

CheckReport ou_mean_check(const Expr& f, std::size_t dim, double t, const QuadratureSpec& spec, double tolerance) {
  const IntegralResult before = gauss_expect(to_field(f, dim), spec);
  IntegralResult after;
  try {
    after = gauss_expect(memoize(ou_apply(f, dim, {t, QuadratureSpec::gauss_hermite(dim)})), spec,
                         Tolerance{1e-9, 1e-9, 4});
  } catch (const NoConvergence& e) {
    after = {e.last_value(), e.last_error(), spec};
  }
  const double err = before.error_estimate + after.error_estimate;
  return make_eq("ou_mean", after.value, before.value, tolerance * std::max(1.0, std::fabs(before.value)) + err,
                 "E f = " + format_number(before.value), err);
}

CheckReport ou_hermite_check(unsigned k, double t, double tolerance) {
  const Expr h = hermite(k);
  const Field moved = ou_apply(h, 1, {t});
  const double factor = std::exp(-static_cast<double>(k) * t);
  double worst = 0.0;
  for (int i = 0; i <= 160; ++i) {
    const double x = -4.0 + 0.05 * i;
    worst = std::max(worst, std::fabs(moved({x}) - factor * h({x})));
  }
  return make_le("ou_hermite", worst, 0.0, tolerance,
                 "k = " + std::to_string(k) + ", t = " + format_number(t) + ", sup error on [-4, 4]");
}

CheckReport ou_contraction_check(const Expr& f, std::size_t dim, YoungKind y, double t, const QuadratureSpec& spec,
                                 double tolerance) {
  const Field base = to_field(f, dim);
  OUSpec ou{t, QuadratureSpec::gauss_hermite(dim)};
  const Field moved = memoize(ou_apply(base, ou));
  auto modular_or_inf = [&](const Field& g) {
    try {
      return modular(g, y, spec);
    } catch (const NoConvergence& e) {
      // Inner-rule error on kinked integrands in n >= 2 keeps the outer rule
      // from settling; a small stalled error is carried instead of failing.
      if (std::isfinite(e.last_error()) && e.last_error() <= 1e-3 * (1.0 + std::fabs(e.last_value()))) {
        return IntegralResult{e.last_value(), e.last_error(), spec};
      }
      return IntegralResult{kInf, 0.0, spec};
    }
  };
  const IntegralResult m_base = modular_or_inf(base);
  const IntegralResult m_moved = modular_or_inf(moved);
  const double n_base = luxemburg_norm(base, y, spec).value;
  const double n_moved = luxemburg_norm(moved, y, spec).value;
  const double err = m_base.error_estimate + m_moved.error_estimate;
  const CheckReport modular_part =
      std::isinf(m_base.value)
          ? make_verdict("ou_contraction.modular", true, young_name(y) + ": modular of f diverges")
          : make_le("ou_contraction.modular", m_moved.value, m_base.value,
                    tolerance * std::max(1.0, m_base.value) + err, young_name(y), err);
  return combine("ou_contraction",
                 {modular_part,
                  make_le("ou_contraction.norm", n_moved, n_base, tolerance * std::max(1.0, n_base), young_name(y))});
}

double kappa(std::size_t n) {
  if (n == 0) throw DimensionMismatch("dimension must be positive");
  const double half = 0.5 * static_cast<double>(n);
  const double log_c = -(half - 1.0) * std::log(2.0) - std::lgamma(half);
  auto density = [&](double r) { return std::exp(log_c + (n - 1.0) * std::log(r) - 0.5 * r * r); };
  const Rule& gl = gauss_legendre_rule(64);
  auto segment = [&](double lo, double hi, auto g) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
      s += gl.weights[i] * g(r) * density(r);
    }
    return 0.5 * (hi - lo) * s;
  };
  auto lin = [](double r) { return r; };
  auto quad = [](double r) { return r * r; };
  const double top = std::sqrt(static_cast<double>(n)) + 40.0;
  double s = segment(0.0, 1.0, lin);
  for (double lo = 1.0; lo < top; lo += 4.0) s += segment(lo, std::min(top, lo + 4.0), quad);
  return s;
}

IntegralResult kappa_quadrature(std::size_t n, const QuadratureSpec& spec) {
  const Expr r = radius(n);
  const Field f = to_field(max(r, r * r), n);
  try {
    return gauss_expect(f, spec, Tolerance{1e-7, 1e-7, 4});
  } catch (const NoConvergence& e) {
    return {e.last_value(), e.last_error(), spec};
  }
}

double lambda_from_kappa(double k) {
  if (!(k > 0.0)) throw DomainError("kappa must be positive");
  const double target = 1.0 / k;
  const double a = target <= 1.0 ? target : std::sqrt(target);
  return 2.0 * a / std::numbers::pi;
}

double lambda_solve(std::size_t n) { return lambda_from_kappa(kappa(n)); }

CheckReport poincare_mixture_check(const Expr& f, std::size_t dim, const QuadratureSpec& spec, double tolerance) {
  const double lambda = lambda_solve(dim);
  Expr grad_sq = Expr::constant(0.0);
  for (const Expr& d : gradient(f, dim)) grad_sq = grad_sq + d * d;
  const Expr grad_norm = sqrt(grad_sq);
  const double mean = gauss_expect(to_field(f, dim), spec).value;
  const Expr centered = f - mean;

  const IntegralResult lhs = modular(to_field(lambda * centered, dim), YoungKind::CoshConj, spec);
  const IntegralResult rhs = modular(to_field(grad_norm, dim), YoungKind::CoshConj, spec);
  const double n_lhs = luxemburg_norm(to_field(centered, dim), YoungKind::CoshConj, spec).value;
  const double n_rhs = luxemburg_norm(to_field(grad_norm, dim), YoungKind::CoshConj, spec).value / lambda;
  const double err = lhs.error_estimate + rhs.error_estimate;
  const std::string note = "lambda = " + format_number(lambda);
  return combine("poincare_mixture",
                 {make_le("poincare_mixture.modular", lhs.value, rhs.value, tolerance + err, note, err),
                  make_le("poincare_mixture.norm", n_lhs, n_rhs, tolerance * std::max(1.0, n_rhs), note)},
                 note);
}

double dispersion_constant() { return std::numbers::pi / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

CheckReport dispersion_bound_check(const Expr& f, std::size_t dim, double m, const QuadratureSpec& spec,
                                   double tolerance) {
  if (!(m >= 0.0)) throw DomainError("Lipschitz bound must be nonnegative");
  gradient(f, dim);  // differentiability of f is part of the hypothesis
  const double mean = gauss_expect(to_field(f, dim), spec).value;
  const double norm = luxemburg_norm(to_field(f - mean, dim), YoungKind::CoshMinusOne, spec).value;
  return make_le("dispersion_bound", norm, dispersion_constant() * m, tolerance,
                 "m = " + format_number(m));
}

double probe_lipschitz_1d(const Expr& f) {
  if (f.arity() > 1) throw DimensionMismatch("grid probe of the Lipschitz bound is one-dimensional");
  const Expr d = derivative(f, 0);
  constexpr std::size_t kGrid = 20001;
  std::vector<double> xs(kGrid), vs(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) xs[i] = -37.0 + 74.0 * static_cast<double>(i) / (kGrid - 1);
  evaluate_batch(d, xs.data(), 1, kGrid, vs.data());
  double m = 0.0;
  for (double v : vs) m = std::max(m, std::fabs(v));
  return m;
}

CheckReport covariance_bound_check(const Expr& f, const Expr& g, std::size_t dim, VectorNormPair pair,
                                   const QuadratureSpec& spec, double tolerance) {
  const auto df = gradient(f, dim);
  const auto dg = gradient(g, dim);
  const double mf = gauss_expect(to_field(f, dim), spec).value;
  const double mg = gauss_expect(to_field(g, dim), spec).value;
  const IntegralResult cov = gauss_expect(to_field((f - mf) * (g - mg), dim), spec);

  std::vector<double> a, b;
  for (std::size_t j = 0; j < dim; ++j) {
    a.push_back(luxemburg_norm(to_field(df[j], dim), YoungKind::CoshConj, spec).value);
    b.push_back(orlicz_dual_norm(to_field(dg[j], dim), YoungKind::CoshMinusOne, spec));
  }
  double rhs = 0.0;
  if (pair == VectorNormPair::L1Linf) {
    double l1 = 0.0, linf = 0.0;
    for (double v : a) l1 += v;
    for (double v : b) linf = std::max(linf, v);
    rhs = l1 * linf;
  } else {
    double sa = 0.0, sb = 0.0;
    for (double v : a) sa += v * v;
    for (double v : b) sb += v * v;
    rhs = std::sqrt(sa) * std::sqrt(sb);
  }
  return make_le("covariance_bound", std::fabs(cov.value), rhs, tolerance * std::max(1.0, rhs) + cov.error_estimate,
                 pair == VectorNormPair::L1Linf ? "l1/linf" : "l2/l2", cov.error_estimate);
}

SufficientStatistic translate_density_coordinate(const SufficientStatistic& U, std::span<const double> h,
                                                 const QuadratureSpec& spec) {
  require_dim(h, U.dim);
  return make_statistic(linear(h) + translate(U.centered(), h), U.dim, spec);
}

CheckReport translated_density_check(const SufficientStatistic& U, std::span<const double> h,
                                     const QuadratureSpec& spec, double tolerance) {
  require_dim(h, U.dim);
  const std::size_t dim = U.dim;
  const SufficientStatistic moved = translate_density_coordinate(U, h, spec);
  std::vector<double> neg(h.begin(), h.end());
  for (double& v : neg) v = -v;
  const double displayed = std::exp(-0.5 * dot(h, h)) *
                           gauss_expect(to_field(exp(linear(neg)) * U.centered(), dim), spec).value;

  const GaussDensity p = patch(U, spec);
  const GaussDensity q = patch(moved, spec);
  const Expr target = translate(p.expr(), h) * exp(linear(h, -0.5 * dot(h, h)));
  const Expr got = q.expr();

  std::vector<std::vector<double>> probes;
  if (dim <= 3) {
    std::size_t total = 1;
    for (std::size_t j = 0; j < dim; ++j) total *= 9;
    for (std::size_t t = 0; t < total; ++t) {
      std::vector<double> x(dim);
      std::size_t code = t;
      for (std::size_t j = 0; j < dim; ++j, code /= 9) x[j] = -2.0 + 0.5 * static_cast<double>(code % 9);
      probes.push_back(x);
    }
  } else {
    Rng rng(0);
    for (int i = 0; i < 64; ++i) {
      std::vector<double> x(dim);
      for (double& v : x) v = uniform(rng, -2.0, 2.0);
      probes.push_back(x);
    }
  }
  double worst = 0.0;
  for (const auto& x : probes) {
    const double t = target(x);
    worst = std::max(worst, std::fabs(got(x) - t) / t);
  }
  return combine("translated_density",
                 {make_le("translated_density.pointwise", worst, 0.0, tolerance, "sup relative error on probe grid"),
                  make_eq("translated_density.constant", displayed, moved.centered_value, tolerance,
                          "displayed constant vs centering constant")});
}

Field mu_translate(const Expr& f, std::size_t dim, const MuSpec& mu, std::size_t order) {
  if (mu.kind == MuSpec::Kind::Mollifier) return mollify(f, dim, mu.param, order);
  if (!(mu.param > 0.0 && mu.param < 1.0)) throw DomainError("Gaussian translation needs variance in (0, 1)");
  const QuadratureSpec inner = QuadratureSpec::gauss_hermite(dim, order);
  const TensorRule rule = inner_rule(inner, dim);
  const Field base = to_field(f, dim);
  return smooth_by(base, 1.0, std::sqrt(mu.param), rule);
}

double mu_exponential_moment(const MuSpec& mu, std::size_t dim) {
  Expr r2 = Expr::constant(0.0);
  for (std::size_t j = 0; j < dim; ++j) r2 = r2 + pow(Expr::coordinate(j), 2);
  if (mu.kind == MuSpec::Kind::Mollifier) {
    const std::vector<double> origin(dim, 0.0);
    return mollify(exp(0.5 * r2), dim, mu.param)(std::span<const double>(origin));
  }
  if (!(mu.param > 0.0 && mu.param < 1.0)) throw DomainError("Gaussian translation needs variance in (0, 1)");
  return gauss_expect(to_field(exp(0.5 * mu.param * r2), dim), QuadratureSpec::for_dimension(dim)).value;
}

CheckReport mu_translate_norm_check(const Expr& f, std::size_t dim, const MuSpec& mu, const QuadratureSpec& spec,
                                    double tolerance) {
  const double moment = mu_exponential_moment(mu, dim);
  const std::string cond = "int e^{|h|^2/2} dmu = " + format_number(moment);
  if (moment > std::sqrt(2.0)) return make_verdict("mu_translate_norm", true, "vacuous: " + cond);
  const double base = luxemburg_norm(to_field(f, dim), YoungKind::CoshMinusOne, spec).value;
  const double moved = luxemburg_norm(memoize(mu_translate(f, dim, mu)), YoungKind::CoshMinusOne, spec).value;
  return make_le("mu_translate_norm", moved, 2.0 * base, tolerance * std::max(1.0, base), cond);
}

CheckReport ou_equality_check(const Expr& f, std::size_t dim, const std::vector<std::vector<double>>& points,
                              const QuadratureSpec& spec, double tolerance) {
  constexpr double kHorizon = 20.0;
  const auto grad = gradient(f, dim);
  const Expr lap = laplacian(f, dim);
  const double mean = gauss_expect(to_field(f, dim), spec).value;
  // In two or more dimensions the tensor rule carries the pointwise values;
  // sigmoids need well above the default order there.
  const std::size_t point_gh = std::min(4 * default_gh_order(dim), max_gh_order(dim));
  const TensorRule inner = inner_rule(QuadratureSpec::gauss_hermite(dim, point_gh), dim);

  std::vector<Field> grad_fields;
  for (const Expr& g : grad) grad_fields.push_back(to_field(g, dim));
  const Field lap_field = to_field(lap, dim);

  const Rule& gl = gauss_legendre_rule(64);
  // Pointwise evaluations are few, so the line rule can afford compact-support
  // derivatives (bumps) their full resolution.
  constexpr std::size_t kPointOrder = 48;
  const double s_lo = std::exp(-kHorizon);
  std::vector<CheckReport> parts;
  for (const auto& x : points) {
    require_dim(x, dim);
    auto integrand = [&](double s) {
      const double t = -std::log(s);
      const double a = s, b = std::sqrt(-std::expm1(-2.0 * t));
      double v = 0.0;
      for (std::size_t j = 0; j < dim; ++j) v += point_value(smooth_by(grad_fields[j], a, b, inner, kPointOrder), x) * x[j];
      v -= s * point_value(smooth_by(lap_field, a, b, inner, kPointOrder), x);
      return v;
    };
    // s = cos(theta) removes the square-root behaviour of b at s = 1.
    double rhs = 0.0;
    const double theta_hi = std::acos(s_lo);
    constexpr int kPieces = 2;
    for (int k = 0; k < kPieces; ++k) {
      const double lo = theta_hi * k / kPieces, hi = theta_hi * (k + 1) / kPieces;
      double piece = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double theta = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
        piece += gl.weights[i] * integrand(std::cos(theta)) * std::sin(theta);
      }
      rhs += 0.5 * (hi - lo) * piece;
    }
    // Neglected part over [0, e^{-T}] in s, bounded by its length times the integrand there.
    const double tail = s_lo * std::fabs(integrand(s_lo));
    const double lhs = f(x) - mean;
    std::ostringstream note;
    note << "x = (";
    for (std::size_t j = 0; j < x.size(); ++j) note << (j ? ", " : "") << format_number(x[j]);
    note << "), truncation bound " << format_number(tail);
    parts.push_back(make_eq("ou_equality", lhs, rhs, tolerance + tail, note.str(), tail));
  }
  return combine("ou_equality", parts);
}

}  // namespace gaussig
