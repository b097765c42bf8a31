#pragma once

// Modulars, Luxemburg and Orlicz norms over the Gaussian weight, and the
// pointwise inequality battery relating the Young functions.

#include <cstddef>
#include <vector>

#include "gaussig/check_report.hpp"
#include "gaussig/expr.hpp"
#include "gaussig/field.hpp"
#include "gaussig/quadrature.hpp"
#include "gaussig/young.hpp"

namespace gaussig {

struct LuxemburgNorm {
  double value = 0.0;
  YoungKind young = YoungKind::CoshMinusOne;
  double modular_at_value = 0.0;  // E_M[Y(f / value)], close to 1 for f != 0
  double error_estimate = 0.0;    // quadrature error of modular_at_value
};

/// E_M[Y(f)]. Divergence (including overflow of Y) surfaces as NoConvergence.
IntegralResult modular(const Field& f, YoungKind y, const QuadratureSpec& spec,
                       const Tolerance& tol = Tolerance::precise());
IntegralResult modular(const Expr& f, YoungKind y, const QuadratureSpec& spec,
                       const Tolerance& tol = Tolerance::precise());

/// inf { rho > 0 : E_M[w Y(f / rho)] <= 1 } with w = 1 unless a weight is
/// given. Bracket by doubling/halving from 1 (60 steps each way), then
/// bisection on log rho. NoConvergence when no finite bracket exists.
LuxemburgNorm luxemburg_norm(const Field& f, YoungKind y, const QuadratureSpec& spec, const Field* weight = nullptr);
LuxemburgNorm luxemburg_norm(const Expr& f, YoungKind y, const QuadratureSpec& spec);

/// Orlicz norm by the Amemiya formula inf_{k>0} (1 + E_M[Y(k f)]) / k,
/// minimized by golden-section search on log k.
double orlicz_dual_norm(const Field& f, YoungKind y, const QuadratureSpec& spec, const Field* weight = nullptr);
double orlicz_dual_norm(const Expr& f, YoungKind y, const QuadratureSpec& spec);

/// (E_M |f|^a)^{1/a}; NoConvergence when infinite.
double lp_norm(const Field& f, double a, const QuadratureSpec& spec);

/// 10^lo ... 10^hi, `count` points.
std::vector<double> logspace(double lo, double hi, std::size_t count);

/// Y*(a y) <= max(|a|, a^2) Y*(y) over the grid, Y* = CoshConj.
CheckReport delta2_check(double a, const std::vector<double>& ygrid, double tolerance = 1e-6);
/// Psi(y) <= Y*(y) <= Psi(2y)/2 and Phi(x)/2 <= (cosh-1)(x) <= Phi(x) pointwise.
CheckReport conjugacy_sandwich_check(const std::vector<double>& grid, double tolerance = 1e-6);
/// x y <= (cosh-1)(x) + Y*(y) on the product grid, with equality at y = sinh(x).
CheckReport fenchel_young_check(const std::vector<double>& xs, const std::vector<double>& ys, double tolerance = 1e-6);

/// Finiteness of the chain L^exp(M), L^a(M), L log L(M), L^1(M), and of the
/// L^a norm of the restriction to |x| < R. Passes iff every space after the
/// first one containing f also contains it, and the restriction is finite.
CheckReport lebesgue_inclusion_check(const Expr& f, std::size_t dim, double a, double R, const QuadratureSpec& spec);

}  // namespace gaussig
