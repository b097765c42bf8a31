#pragma once

// Orlicz-Sobolev calculus over the Gaussian: graph norms, the Stein operator
// and integration by parts, the directional-derivative identity, product and
// chain rules, and derivatives of exponential-form densities.
//
// Derivatives are symbolic, so the distributional derivative of an element is
// its classical one by construction; the weak-form checks are the numerical
// witnesses.

#include <cstddef>
#include <span>
#include <vector>

#include "gaussig/check_report.hpp"
#include "gaussig/expr.hpp"
#include "gaussig/quadrature.hpp"
#include "gaussig/young.hpp"

namespace gaussig {

struct SobolevElement {
  Expr f;
  std::size_t dim = 1;
  std::vector<Expr> grad;  // grad[j] == derivative(f, j)
};

/// Throws NotDifferentiable when f has a non-differentiable node.
SobolevElement make_sobolev(const Expr& f, std::size_t dim);

/// ||f||_Y + sum_j ||d_j f||_Y. NoConvergence names the failing term.
double graph_norm(const SobolevElement& e, YoungKind y, const QuadratureSpec& spec);

/// x_j phi - d_j phi.
Expr stein_apply(const Expr& phi, std::size_t j);
/// Stein operator applied k times to 1, compared with He_k coefficient-wise.
CheckReport hermite_ladder_check(unsigned k_max, std::size_t j = 0);

/// E_M[d_j f phi] = E_M[f (stein_apply(phi, j))].
CheckReport ibp_check(const Expr& f, const Expr& phi, std::size_t j, std::size_t dim, const QuadratureSpec& spec,
                      double tolerance = 1e-6);

/// (a) f(x + t h) - f(x) = t int_0^1 grad f(x + s t h).h ds at each probe point;
/// (b) ||f(. + t h) - f||_exp <= 2 |t| || |grad f| ||_exp when |t| <= sqrt(log 2),
/// reported as vacuous beyond or when norm_clause is false (f outside the
/// exponential space). h must be a unit vector.
CheckReport directional_identity_check(const Expr& f, std::span<const double> h, double t,
                                       const std::vector<std::vector<double>>& points, const QuadratureSpec& spec,
                                       double tolerance = 1e-8, bool norm_clause = true);

/// d_j(f g) against d_j f g + f d_j g on a probe grid, plus L^1(M) finiteness of
/// the three terms.
CheckReport product_rule_check(const Expr& f, const Expr& g, std::size_t j, std::size_t dim,
                               const QuadratureSpec& spec, double tolerance = 1e-10);

/// Scalar maps with bounded derivative used by the chain rule.
struct ChainMap {
  enum class Kind { Tanh, ArctanScaled, CutoffExp };
  Kind kind = Kind::Tanh;
  double n = 1.0;  // CutoffExp: F_n(x) = chi(x / n) e^x, chi = 1 on [-1, 1], 0 off [-2, 2]

  static ChainMap tanh_map() { return {Kind::Tanh, 1.0}; }
  static ChainMap arctan_scaled() { return {Kind::ArctanScaled, 1.0}; }
  static ChainMap cutoff_exp(double n) { return {Kind::CutoffExp, n}; }
};

/// F(u) built on top of u.
Expr chain_apply(const ChainMap& F, const Expr& u);
/// F'(u) in closed form, written independently of the symbolic derivative.
Expr chain_derivative(const ChainMap& F, const Expr& u);

/// d_j F(U) against F'(U) d_j U on a probe grid, plus finite exponential
/// modulars of F(U) and d_j F(U).
CheckReport chain_rule_check(const ChainMap& F, const Expr& U, std::size_t j, std::size_t dim,
                             const QuadratureSpec& spec, double tolerance = 1e-10);

/// With p = e^{U - K_M(U)}: (a) d_j(f p) = (d_j f + f d_j U) p on a probe grid;
/// (b) <f p, stein_apply(phi, j)> = <(d_j f + f d_j U) p, phi> for five
/// polynomial phi; (c) f p in L^gamma(M) for some gamma in {1.5, 1.25, 1.1}.
CheckReport exp_weight_derivative_check(const Expr& U, const Expr& f, std::size_t j, std::size_t dim,
                                        const QuadratureSpec& spec, double tolerance = 1e-6);

/// Var_M(f) <= E_M[|grad f|^2].
CheckReport gauss_poincare_check(const Expr& f, std::size_t dim, const QuadratureSpec& spec,
                                 double tolerance = 1e-6);

/// d_j(f * omega_lambda) = (d_j f) * omega_lambda at the probe points; the left
/// side by a Richardson-extrapolated central difference.
CheckReport mollify_derivative_check(const Expr& f, std::size_t j, std::size_t dim, double lambda,
                                     const std::vector<std::vector<double>>& points, double tolerance = 1e-7);

/// lebesgue_inclusion_check on f and on every partial derivative.
CheckReport sobolev_inclusion_check(const SobolevElement& e, double a, double R, const QuadratureSpec& spec);

}  // namespace gaussig
