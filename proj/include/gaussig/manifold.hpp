#pragma once

// The maximal exponential model around the standard Gaussian: partition and
// cumulant functionals, the chart s_M and patch e_M, domain and moment
// membership, finite-dimensional exponential families, and the statistical
// bundle inner product.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gaussig/check_report.hpp"
#include "gaussig/expr.hpp"
#include "gaussig/field.hpp"
#include "gaussig/quadrature.hpp"

namespace gaussig {

/// Working statistic U = u - centered_value with centered_value = E_M[u]
/// (or the mean under another base density when built by chart_at).
struct SufficientStatistic {
  Expr u;
  double centered_value = 0.0;
  std::size_t dim = 1;

  Expr centered() const { return u - centered_value; }
};

/// Centers u under M.
SufficientStatistic make_statistic(const Expr& u, std::size_t dim, const QuadratureSpec& spec);

/// p = exp(U - K), K = K_M(U).
struct GaussDensity {
  SufficientStatistic U;
  double K = 0.0;
  double K_error = 0.0;

  Expr expr() const { return exp(U.centered() - K); }
  Field field() const { return to_field(expr(), U.dim); }
};

/// Z_M(U) = E_M[e^U]. NoConvergence when U is outside the proper domain.
IntegralResult partition(const SufficientStatistic& U, const QuadratureSpec& spec);
IntegralResult partition(const Expr& U, const QuadratureSpec& spec);
/// K_M(U) = log Z_M(U); error estimate propagated to first order.
IntegralResult cumulant(const SufficientStatistic& U, const QuadratureSpec& spec);
IntegralResult cumulant(const Expr& U, const QuadratureSpec& spec);

/// e_M(U); checks E_M[p] = 1 to 1e-8 (NotADensity otherwise).
GaussDensity patch(const SufficientStatistic& U, const QuadratureSpec& spec);
/// s_M(p) = log p - E_M[log p] for a positive density expression.
SufficientStatistic chart(const Expr& p, std::size_t dim, const QuadratureSpec& spec);
SufficientStatistic chart(const GaussDensity& p, const QuadratureSpec& spec);

/// s_f(g) = log(g/f) - E_{f M}[log(g/f)].
SufficientStatistic chart_at(const GaussDensity& f, const GaussDensity& g, const QuadratureSpec& spec);

/// Compares the central difference of e_M along H with e_M(U)(H - E_{e_M(U) M}[H])
/// in the L log L Luxemburg norm at eps and eps/2. Passes when the ratio of the
/// two discrepancies lies in [1.7, 4.3] or both are below 1e-9.
CheckReport patch_derivative_check(const Expr& U, const Expr& H, std::size_t dim, const QuadratureSpec& spec,
                                   double eps = 1e-3);

struct AlphaVerdict {
  double alpha;
  bool converged;  // both E_M[e^{alpha U}] and E_M[e^{-alpha U}] finite
};
/// Finiteness of e^{+-alpha U} for alpha in {1.05, 1.25, 1.5, 2, 4}.
std::vector<AlphaVerdict> domain_alpha_scan(const Expr& U, std::size_t dim, const QuadratureSpec& spec);
/// Passes iff some alpha > 1 on the grid has both moments finite.
CheckReport domain_membership(const Expr& U, std::size_t dim, const QuadratureSpec& spec);

/// Z_M(U) <= 4 whenever E_M[(cosh-1)(alpha U)] <= 1 for some alpha > 1. Checked
/// with alpha = 1 / ||U||_exp; vacuous (pass) when that alpha is <= 1.
CheckReport partition_bound_check(const Expr& U, std::size_t dim, const QuadratureSpec& spec);

/// E_M[p^{n1/(n1-1)}] <= 2^{n1/(n1-1)} and E_M[p^{-1/(n2-1)}] <= 2^{n2/(n2-1)}.
/// When both hold, also checks ||U||_{p M} <= 2^{n1} ||U||_M and
/// ||U||_M <= 2^{n2} ||U||_{p M} (exponential Luxemburg norms) on `statistics`
/// random statistics drawn from `seed`. p is normalized within 1%.
CheckReport moment_membership(const Field& p, int n1, int n2, const QuadratureSpec& spec,
                              std::size_t statistics = 5, std::uint64_t seed = 0);
/// Tries (n1, n2) in 3..8 and reports the first pair that passes (or the last failure).
CheckReport moment_membership_search(const Field& p, const QuadratureSpec& spec, std::size_t statistics = 5,
                                     std::uint64_t seed = 0);

struct ExpFamily {
  std::vector<SufficientStatistic> stats;
  std::vector<double> theta;
  double psi = 0.0;
  double psi_error = 0.0;

  Expr combination() const;  // sum_j theta_j U_j
  Expr density() const { return exp(combination() - psi); }
};

ExpFamily exp_family(const std::vector<SufficientStatistic>& stats, const std::vector<double>& theta,
                     const QuadratureSpec& spec);

/// E_M[|p - q|]. One-dimensional fields are split at their crossings.
double variation_distance(const Field& p, const Field& q, const QuadratureSpec& spec);
double variation_distance(const Expr& p, const Expr& q, std::size_t dim, const QuadratureSpec& spec);

/// For each theta (a grid with sum |theta_j| <= alpha / 2 when `thetas` is
/// empty), distances between p_theta and the family built from the smooth
/// compactly supported statistics (U_j * cutoff_{R_k}) * omega_{lambda_k},
/// R_k = 2k, lambda_k = 1 / R_k. One report per theta: passes iff the
/// distances are nonincreasing (slack 1e-6) and the last is below 0.05.
std::vector<CheckReport> mollified_family_approx(const std::vector<SufficientStatistic>& stats, double alpha,
                                                 const std::vector<int>& k_list, const QuadratureSpec& spec,
                                                 std::vector<std::vector<double>> thetas = {});

/// E_M[p (U - E_p U)(V - E_p V)].
double bundle_inner(const GaussDensity& p, const Expr& U, const Expr& V, const QuadratureSpec& spec);

/// Image of the standard Gaussian under an increasing C^1 map chi of the line:
/// density q relative to M, and finiteness of E_M[q^{1+eps}] and E_M[q^{-eps}]
/// (the latter equals E_{q M}[q^{-(1+eps)}]) with eps from the derivative bounds.
/// NotMonotone when chi' is not bounded away from 0 on the probe grid.
/// Integrals use the piecewise rule on the line.
CheckReport diffeo_image_density_1d(const Expr& chi);
/// The density q itself (NotMonotone as above).
Field diffeo_image_density(const Expr& chi);

}  // namespace gaussig
