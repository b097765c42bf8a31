#pragma once

// Entropy of densities with respect to the standard Gaussian measure and its
// relation to membership in the mixture space L log L(M).

#include "gaussig/check_report.hpp"
#include "gaussig/expr.hpp"
#include "gaussig/field.hpp"
#include "gaussig/quadrature.hpp"

namespace gaussig {

struct EntropyReport {
  double normalizer = 1.0;        // E_M[p] before normalization
  double entropy = 0.0;           // -E_M[p log p]; -inf when divergent
  double logplus_integral = 0.0;  // E_M[p log+ p]; +inf when divergent
  double mixture_modular = 0.0;   // E_M[Y*(p)] with Y* = CoshConj; +inf when divergent
  bool entropy_finite = true;
  bool mixture_finite = true;
  double error_estimate = 0.0;  // largest quadrature error among the finite fields
};

/// E_M[p], falling back to the piecewise rule for heavy-tailed one-dimensional
/// densities. Throws NotADensity when it cannot be computed to 1%.
double density_normalizer(const Field& p, const QuadratureSpec& spec);

/// Normalizes p when E_M[p] is within 1% of 1 (NotADensity otherwise) and
/// integrates the three functionals. Negative values raise DomainError; p = 0
/// contributes 0 log 0 = 0. Finiteness means convergence under refinement.
EntropyReport entropy(const Field& p, const QuadratureSpec& spec);
EntropyReport entropy(const Expr& p, const QuadratureSpec& spec);

/// Finite entropy and finite mixture modular must agree.
CheckReport entropy_membership_check(const Field& p, const QuadratureSpec& spec);
CheckReport entropy_membership_check(const Expr& p, const QuadratureSpec& spec);

/// -E[p log+ p] <= H(p) <= 1/e - E[p log+ p], tolerance widened by the report's error.
CheckReport logplus_bracket_check(const EntropyReport& r, double tolerance = 1e-6);

/// E[Y*(p)] + Y*(1) = E[Y*(max(1, p))] + E[Y*(min(1, p))].
CheckReport mixture_split_check(const Field& p, const QuadratureSpec& spec, double tolerance = 1e-6);

}  // namespace gaussig
