#include "gaussig/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gaussig/error.hpp"
#include "gaussig/field.hpp"
#include "gaussig/orlicz.hpp"
#include "gaussig/sampling.hpp"

namespace gaussig {

namespace {

// Coordinate-major probe batch: a line grid in one dimension, seeded uniform
// points in a cube otherwise.
struct Probes {
  std::size_t dim = 1;
  std::size_t count = 0;
  std::vector<double> coords;
};

Probes probe_grid(std::size_t dim) {
  Probes p;
  p.dim = dim;
  if (dim == 1) {
    p.count = 101;
    for (std::size_t i = 0; i < p.count; ++i) p.coords.push_back(-5.0 + 0.1 * static_cast<double>(i));
    return p;
  }
  p.count = 200;
  p.coords.resize(dim * p.count);
  Rng rng(7);
  for (std::size_t i = 0; i < p.count; ++i) {
    for (std::size_t j = 0; j < dim; ++j) p.coords[j * p.count + i] = uniform(rng, -3.0, 3.0);
  }
  return p;
}

// Largest |a - b| / max(1, |a|, |b|) over the probes.
double worst_relative_gap(const Expr& a, const Expr& b, const Probes& p) {
  std::vector<double> va(p.count), vb(p.count);
  evaluate_batch(a, p.coords.data(), p.dim, p.count, va.data());
  evaluate_batch(b, p.coords.data(), p.dim, p.count, vb.data());
  double worst = 0.0;
  for (std::size_t i = 0; i < p.count; ++i) {
    const double scale = std::max({1.0, std::fabs(va[i]), std::fabs(vb[i])});
    const double gap = std::fabs(va[i] - vb[i]) / scale;
    if (std::isnan(gap)) return gap;
    worst = std::max(worst, gap);
  }
  return worst;
}

CheckReport grid_equality(std::string name, const Expr& a, const Expr& b, std::size_t dim, double tolerance) {
  const Probes p = probe_grid(dim);
  return make_le(std::move(name), worst_relative_gap(a, b, p), 0.0, tolerance,
                 "relative sup gap over " + std::to_string(p.count) + " probe points");
}

bool finite_mean(const Expr& f, std::size_t dim, const QuadratureSpec& spec) {
  return try_gauss_expect(to_field(f, dim), spec).has_value();
}

bool finite_modular(const Expr& f, std::size_t dim, YoungKind y, const QuadratureSpec& spec) {
  return try_gauss_expect(map(to_field(f, dim), [y](double v) { return young_eval(y, v); }), spec).has_value();
}

void require_differentiable(const Expr& f) {
  if (!is_differentiable(f)) throw NotDifferentiable("expression has a non-differentiable node: " + f.to_string());
}

// chi(t): 1 on [-1, 1], 0 off [-2, 2].
Expr cutoff(const Expr& t) { return smooth_step(2.0 - t) * smooth_step(t + 2.0); }
Expr cutoff_d1(const Expr& t) {
  return smooth_step(2.0 - t) * smooth_step_d1(t + 2.0) - smooth_step_d1(2.0 - t) * smooth_step(t + 2.0);
}

}  // namespace

SobolevElement make_sobolev(const Expr& f, std::size_t dim) {
  require_differentiable(f);
  return {f, dim, gradient(f, dim)};
}

double graph_norm(const SobolevElement& e, YoungKind y, const QuadratureSpec& spec) {
  auto term = [&](const Expr& g, const std::string& label) {
    try {
      return luxemburg_norm(to_field(g, e.dim), y, spec).value;
    } catch (const NoConvergence& err) {
      throw NoConvergence("graph norm term " + label + ": " + err.what(), err.last_value(), err.last_error());
    }
  };
  double total = term(e.f, "f");
  for (std::size_t j = 0; j < e.grad.size(); ++j) total += term(e.grad[j], "d_" + std::to_string(j) + " f");
  return total;
}

Expr stein_apply(const Expr& phi, std::size_t j) {
  require_differentiable(phi);
  return Expr::coordinate(j) * phi - derivative(phi, j);
}

CheckReport hermite_ladder_check(unsigned k_max, std::size_t j) {
  const std::size_t dim = j + 1;
  Expr current = Expr::constant(1.0);
  std::vector<CheckReport> parts;
  for (unsigned k = 1; k <= k_max; ++k) {
    current = stein_apply(current, j);
    const auto got = to_polynomial(current, dim);
    const auto want = to_polynomial(hermite(k, j), dim);
    const double gap = got && want ? polynomial_distance(*got, *want) : std::numeric_limits<double>::quiet_NaN();
    parts.push_back(make_eq("hermite_ladder.k" + std::to_string(k), gap, 0.0, 0.0,
                            "delta^" + std::to_string(k) + " 1 = " + current.to_string()));
  }
  return combine("hermite_ladder", parts);
}

CheckReport ibp_check(const Expr& f, const Expr& phi, std::size_t j, std::size_t dim, const QuadratureSpec& spec,
                      double tolerance) {
  require_differentiable(f);
  const IntegralResult lhs = gauss_expect(to_field(derivative(f, j) * phi, dim), spec);
  const IntegralResult rhs = gauss_expect(to_field(f * stein_apply(phi, j), dim), spec);
  const double err = lhs.error_estimate + rhs.error_estimate;
  return make_eq("ibp", lhs.value, rhs.value, tolerance * std::max(1.0, std::fabs(lhs.value)) + err,
                 "<d_j f, phi> = " + format_number(lhs.value) + ", <f, delta_j phi> = " + format_number(rhs.value),
                 err);
}

CheckReport directional_identity_check(const Expr& f, std::span<const double> h, double t,
                                       const std::vector<std::vector<double>>& points, const QuadratureSpec& spec,
                                       double tolerance, bool norm_clause) {
  const std::size_t dim = h.size();
  double h2 = 0.0;
  for (double v : h) h2 += v * v;
  if (std::fabs(std::sqrt(h2) - 1.0) > 1e-12) throw DomainError("direction must be a unit vector");
  const SobolevElement e = make_sobolev(f, dim);

  std::vector<double> back(dim);
  for (std::size_t j = 0; j < dim; ++j) back[j] = -t * h[j];
  const Expr moved = translate(f, back);  // x -> f(x + t h)

  std::vector<CheckReport> parts;
  const Rule& gl = gauss_legendre_rule(64);
  std::vector<double> y(dim);
  for (const auto& x : points) {
    if (x.size() != dim) throw DimensionMismatch("probe point has the wrong dimension");
    double integral = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double s = 0.5 + 0.5 * gl.nodes[q];
      for (std::size_t j = 0; j < dim; ++j) y[j] = x[j] + s * t * h[j];
      double dd = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dd += e.grad[j](y) * h[j];
      integral += 0.5 * gl.weights[q] * dd;
    }
    const double lhs = moved(x) - f(x);
    const double rhs = t * integral;
    parts.push_back(make_eq("directional.pointwise", lhs, rhs, tolerance * std::max(1.0, std::fabs(lhs)),
                            "f(x+th) - f(x) = " + format_number(lhs)));
  }

  if (!norm_clause) {
    parts.push_back(make_verdict("directional.norm", true, "not requested"));
  } else if (std::fabs(t) <= std::sqrt(std::log(2.0))) {
    Expr grad_sq = Expr::constant(0.0);
    for (const Expr& g : e.grad) grad_sq = grad_sq + g * g;
    const double left = luxemburg_norm(to_field(moved - f, dim), YoungKind::CoshMinusOne, spec).value;
    const double grad_norm = luxemburg_norm(to_field(sqrt(grad_sq), dim), YoungKind::CoshMinusOne, spec).value;
    const double right = 2.0 * std::fabs(t) * grad_norm;
    parts.push_back(make_le("directional.norm", left, right, 1e-9 * std::max(1.0, right),
                            "||grad f|| = " + format_number(grad_norm)));
  } else {
    parts.push_back(make_verdict("directional.norm", true, "vacuous: |t| > sqrt(log 2)"));
  }
  return combine("directional_identity", parts);
}

CheckReport product_rule_check(const Expr& f, const Expr& g, std::size_t j, std::size_t dim,
                               const QuadratureSpec& spec, double tolerance) {
  require_differentiable(f);
  require_differentiable(g);
  const Expr df = derivative(f, j), dg = derivative(g, j);
  const Expr left = derivative(f * g, j);
  const Expr right = df * g + f * dg;
  const bool l1 = finite_mean(abs(f * g), dim, spec) && finite_mean(abs(df * g), dim, spec) &&
                  finite_mean(abs(f * dg), dim, spec);
  return combine("product_rule", {grid_equality("product_rule.grid", left, right, dim, tolerance),
                                  make_verdict("product_rule.l1", l1, "E|fg|, E|d_j f g|, E|f d_j g| finite")});
}

Expr chain_apply(const ChainMap& F, const Expr& u) {
  switch (F.kind) {
    case ChainMap::Kind::Tanh: return tanh(u);
    case ChainMap::Kind::ArctanScaled: return (2.0 / std::numbers::pi) * atan(u);
    case ChainMap::Kind::CutoffExp: return cutoff((1.0 / F.n) * u) * exp(u);
  }
  return u;
}

Expr chain_derivative(const ChainMap& F, const Expr& u) {
  switch (F.kind) {
    case ChainMap::Kind::Tanh: {
      const Expr c = cosh(u);
      return recip(c * c);
    }
    case ChainMap::Kind::ArctanScaled: return (2.0 / std::numbers::pi) * recip(1.0 + u * u);
    case ChainMap::Kind::CutoffExp: {
      const Expr t = (1.0 / F.n) * u;
      return ((1.0 / F.n) * cutoff_d1(t) + cutoff(t)) * exp(u);
    }
  }
  return Expr::constant(1.0);
}

CheckReport chain_rule_check(const ChainMap& F, const Expr& U, std::size_t j, std::size_t dim,
                             const QuadratureSpec& spec, double tolerance) {
  require_differentiable(U);
  const Expr composed = chain_apply(F, U);
  const Expr left = derivative(composed, j);
  const Expr right = chain_derivative(F, U) * derivative(U, j);
  const bool member =
      finite_modular(composed, dim, YoungKind::CoshMinusOne, spec) && finite_modular(left, dim, YoungKind::CoshMinusOne, spec);
  return combine("chain_rule", {grid_equality("chain_rule.grid", left, right, dim, tolerance),
                                make_verdict("chain_rule.membership", member, "cosh - 1 modular of F(U) and d_j F(U)")});
}

CheckReport exp_weight_derivative_check(const Expr& U, const Expr& f, std::size_t j, std::size_t dim,
                                        const QuadratureSpec& spec, double tolerance) {
  require_differentiable(U);
  require_differentiable(f);
  const double K = gauss_expect(to_field(exp(U), dim), spec).value;
  const Expr p = exp(U - std::log(K));
  const Expr weighted = f * p;
  const Expr claimed = (derivative(f, j) + f * derivative(U, j)) * p;

  std::vector<CheckReport> parts;
  parts.push_back(grid_equality("exp_weight.pointwise", derivative(weighted, j), claimed, dim, 1e-10));

  std::vector<Expr> phis = {Expr::constant(1.0), Expr::coordinate(j), hermite(2, j), hermite(3, j)};
  Rng rng(0);
  phis.push_back(random_polynomial(rng, dim, 2));
  for (const Expr& phi : phis) {
    const IntegralResult lhs = gauss_expect(to_field(weighted * stein_apply(phi, j), dim), spec);
    const IntegralResult rhs = gauss_expect(to_field(claimed * phi, dim), spec);
    const double err = lhs.error_estimate + rhs.error_estimate;
    parts.push_back(make_eq("exp_weight.weak", lhs.value, rhs.value,
                            tolerance * std::max(1.0, std::fabs(lhs.value)) + err, "phi = " + phi.to_string(), err));
  }

  std::string found = "none";
  for (double gamma : {1.5, 1.25, 1.1}) {
    const Field power = map(to_field(weighted, dim), [gamma](double v) { return std::pow(std::fabs(v), gamma); });
    if (try_gauss_expect(power, spec)) {
      found = format_number(gamma);
      break;
    }
  }
  parts.push_back(make_verdict("exp_weight.integrability", found != "none", "f p in L^gamma for gamma = " + found));
  return combine("exp_weight_derivative", parts, "K = " + format_number(std::log(K)));
}

CheckReport gauss_poincare_check(const Expr& f, std::size_t dim, const QuadratureSpec& spec, double tolerance) {
  const SobolevElement e = make_sobolev(f, dim);
  const IntegralResult mean = gauss_expect(to_field(f, dim), spec);
  const IntegralResult var = gauss_expect(to_field(pow(f - mean.value, 2), dim), spec);
  Expr energy = Expr::constant(0.0);
  for (const Expr& g : e.grad) energy = energy + g * g;
  const IntegralResult rhs = gauss_expect(to_field(energy, dim), spec);
  const double err = var.error_estimate + rhs.error_estimate + 2.0 * std::fabs(mean.value) * mean.error_estimate;
  return make_le("gauss_poincare", var.value, rhs.value, tolerance * std::max(1.0, rhs.value) + err,
                 "Var f = " + format_number(var.value) + ", E|grad f|^2 = " + format_number(rhs.value), err);
}

CheckReport mollify_derivative_check(const Expr& f, std::size_t j, std::size_t dim, double lambda,
                                     const std::vector<std::vector<double>>& points, double tolerance) {
  require_differentiable(f);
  const Field smooth = mollify(f, dim, lambda);
  const Field smooth_d = mollify(derivative(f, j), dim, lambda);
  constexpr double kStep = 1e-2;
  std::vector<CheckReport> parts;
  for (const auto& x : points) {
    if (x.size() != dim) throw DimensionMismatch("probe point has the wrong dimension");
    auto central = [&](double step) {
      std::vector<double> a = x, b = x;
      a[j] += step;
      b[j] -= step;
      return (smooth(a) - smooth(b)) / (2.0 * step);
    };
    const double lhs = (4.0 * central(0.5 * kStep) - central(kStep)) / 3.0;
    const double rhs = smooth_d(x);
    parts.push_back(make_eq("mollify_derivative.point", lhs, rhs, tolerance * std::max(1.0, std::fabs(rhs)),
                            "(d_j f) * omega = " + format_number(rhs)));
  }
  return combine("mollify_derivative", parts);
}

CheckReport sobolev_inclusion_check(const SobolevElement& e, double a, double R, const QuadratureSpec& spec) {
  std::vector<CheckReport> parts;
  CheckReport base = lebesgue_inclusion_check(e.f, e.dim, a, R, spec);
  base.name = "sobolev_inclusion.f";
  parts.push_back(base);
  for (std::size_t j = 0; j < e.grad.size(); ++j) {
    CheckReport r = lebesgue_inclusion_check(e.grad[j], e.dim, a, R, spec);
    r.name = "sobolev_inclusion.d" + std::to_string(j);
    parts.push_back(r);
  }
  return combine("sobolev_inclusion", parts);
}

}  // namespace gaussig
