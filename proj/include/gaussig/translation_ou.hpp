#pragma once

// Translations and their Gaussian adjoints, the exponential class, mollifier
// convergence, the Ornstein-Uhlenbeck semigroup by Mehler's formula, and the
// Poincare-type inequalities built on it.

#include <cstddef>
#include <span>
#include <vector>

#include "gaussig/check_report.hpp"
#include "gaussig/expr.hpp"
#include "gaussig/field.hpp"
#include "gaussig/manifold.hpp"
#include "gaussig/quadrature.hpp"
#include "gaussig/young.hpp"

namespace gaussig {

/// x -> exp(-h.x - |h|^2/2) g(x + h).
Expr adjoint_translate(const Expr& g, std::span<const double> h);

/// E_M[(tau_h f) g] = E_M[f (tau_h^* g)].
CheckReport adjoint_duality_check(const Expr& f, const Expr& g, std::span<const double> h, std::size_t dim,
                                  const QuadratureSpec& spec, double tolerance = 1e-8);

/// ||tau_h f||_exp <= 2 ||f||_exp for |h| <= sqrt(log 2) (DomainError otherwise).
CheckReport translation_norm_bound_check(const Expr& f, std::span<const double> h, std::size_t dim,
                                         const QuadratureSpec& spec, double tolerance = 1e-6);

/// (a) E_M[(cosh-1)(rho f)] finite for rho in {1, 2, 4, 8}; (b) the tail norms
/// ||f 1{|x| > R}||_exp strictly decrease over R_list and the last is at most
/// half the first. Passes iff both.
CheckReport exp_class_membership(const Expr& f, std::size_t dim, const std::vector<double>& R_list,
                                 const QuadratureSpec& spec);

/// ||f * omega_lambda - f||_exp nonincreasing over lambda_list (listed from
/// large to small) and the last below 0.05 ||f||_exp.
CheckReport mollifier_convergence_check(const Expr& f, std::size_t dim, const std::vector<double>& lambda_list,
                                        const QuadratureSpec& spec);

struct OUSpec {
  double t = 0.0;
  /// Gauss-Hermite rule for the inner y-integral; order 0 picks the default.
  QuadratureSpec inner = QuadratureSpec::gauss_hermite(1);
};

/// x -> E_Y[f(e^{-t} x + sqrt(1 - e^{-2t}) Y)] with a tensor Gauss-Hermite rule in Y.
Field ou_apply(const Field& f, const OUSpec& ou);
Field ou_apply(const Expr& f, std::size_t dim, const OUSpec& ou);

/// P_s P_t f = P_{s+t} f at the probe points.
CheckReport ou_semigroup_check(const Expr& f, std::size_t dim, double s, double t,
                               const std::vector<std::vector<double>>& points, double tolerance = 1e-6);
/// E_M[P_t f] = E_M[f].
CheckReport ou_mean_check(const Expr& f, std::size_t dim, double t, const QuadratureSpec& spec,
                          double tolerance = 1e-6);
/// P_t He_k = e^{-k t} He_k, sup error over a grid of [-4, 4].
CheckReport ou_hermite_check(unsigned k, double t, double tolerance = 1e-6);

/// E_M[Y(P_t f)] <= E_M[Y(f)] and ||P_t f||_Y <= ||f||_Y.
CheckReport ou_contraction_check(const Expr& f, std::size_t dim, YoungKind y, double t, const QuadratureSpec& spec,
                                 double tolerance = 1e-8);

/// kappa_n = E_M[max(|y|, |y|^2)] through the chi distribution of |y|.
double kappa(std::size_t n);
/// The same quantity by direct quadrature on R^n (tensor or QMC per spec).
IntegralResult kappa_quadrature(std::size_t n, const QuadratureSpec& spec);
/// Solves C(lambda pi / 2) kappa = 1 with C(a) = max(a, a^2).
double lambda_from_kappa(double kappa);
double lambda_solve(std::size_t n);

/// E_M[Y*(lambda (f - E f))] <= E_M[Y*(|grad f|)] and
/// ||f - E f||_{Y*} <= ||grad f||_{Y*} / lambda, Y* = CoshConj.
CheckReport poincare_mixture_check(const Expr& f, std::size_t dim, const QuadratureSpec& spec,
                                   double tolerance = 1e-6);

/// pi / (2 sqrt(2 log 2)).
double dispersion_constant();
/// ||f - E f||_exp <= dispersion_constant() * m for sup |grad f| = m.
CheckReport dispersion_bound_check(const Expr& f, std::size_t dim, double m, const QuadratureSpec& spec,
                                   double tolerance = 1e-6);
/// max |f'| on a grid of 20001 points in [-37, 37] (one dimension only).
double probe_lipschitz_1d(const Expr& f);

enum class VectorNormPair { L1Linf, L2L2 };

/// |Cov_M(f, g)| <= |(||d_j f||_{Y*})_j|_p |(||d_j g||_{Y,Orlicz})_j|_q with
/// (p, q) the chosen dual pair of vector norms.
CheckReport covariance_bound_check(const Expr& f, const Expr& g, std::size_t dim, VectorNormPair pair,
                                   const QuadratureSpec& spec, double tolerance = 1e-6);

/// h.x + tau_h U - e^{-|h|^2/2} E_M[e^{-h.x} U], re-centered under M.
SufficientStatistic translate_density_coordinate(const SufficientStatistic& U, std::span<const double> h,
                                                 const QuadratureSpec& spec);
/// patch(translate_density_coordinate(U, h)) equals p(x - h) M(x - h) / M(x)
/// on a probe grid (sup relative error), and the displayed constant equals the
/// centering constant.
CheckReport translated_density_check(const SufficientStatistic& U, std::span<const double> h,
                                     const QuadratureSpec& spec, double tolerance = 1e-8);

struct MuSpec {
  enum class Kind { Gaussian, Mollifier };
  Kind kind = Kind::Gaussian;
  double param = 0.0;  // variance sigma^2 < 1, or mollifier scale lambda

  static MuSpec gaussian(double variance) { return {Kind::Gaussian, variance}; }
  static MuSpec mollifier(double lambda) { return {Kind::Mollifier, lambda}; }
};

/// x -> integral of f(x - y) mu(dy).
Field mu_translate(const Expr& f, std::size_t dim, const MuSpec& mu, std::size_t order = 0);
/// integral of e^{|h|^2 / 2} mu(dh), by quadrature.
double mu_exponential_moment(const MuSpec& mu, std::size_t dim);
/// When mu_exponential_moment <= sqrt(2): ||tau_mu f||_exp <= 2 ||f||_exp.
/// Vacuous pass otherwise.
CheckReport mu_translate_norm_check(const Expr& f, std::size_t dim, const MuSpec& mu, const QuadratureSpec& spec,
                                    double tolerance = 1e-6);

/// f(x) - E f = int_0^T e^{-t} (P_t grad f)(x).x dt - int_0^T e^{-2t} (P_t lap f)(x) dt,
/// T = 20, at each probe point; s = e^{-t} and Gauss-Legendre in s.
CheckReport ou_equality_check(const Expr& f, std::size_t dim, const std::vector<std::vector<double>>& points,
                              const QuadratureSpec& spec, double tolerance = 1e-6);

}  // namespace gaussig
