#pragma once

// Expectations under the standard Gaussian density M on R^n, Lebesgue
// integrals over balls, and convolution with the standard bump.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaussig/expr.hpp"
#include "gaussig/field.hpp"

namespace gaussig {

enum class Scheme {
  GaussHermite,  // tensor rule, n <= 4
  Qmc,           // scrambled Sobol points through the normal quantile
  Piecewise1d,   // tanh-sinh on segments split at breakpoints, n == 1
};

std::string scheme_name(Scheme s);

struct QuadratureSpec {
  Scheme scheme = Scheme::GaussHermite;
  std::size_t dimension = 1;
  std::size_t order = 0;  // Gauss-Hermite points per axis; 0 picks the default
  std::size_t samples = 4096;
  std::uint64_t seed = 0;
  // Route one-dimensional fields with breakpoints to Piecewise1d.
  bool split_at_kinks = true;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  static QuadratureSpec gauss_hermite(std::size_t n, std::size_t m = 0);
  static QuadratureSpec qmc(std::size_t n, std::size_t samples = 4096, std::uint64_t seed = 0);
  static QuadratureSpec piecewise();
  /// Gauss-Hermite for n <= 4, QMC above.
  static QuadratureSpec for_dimension(std::size_t n, std::uint64_t seed = 0);

  bool operator==(const QuadratureSpec&) const = default;
};

/// Default per-axis Gauss-Hermite order (GAUSSIG_QUAD_ORDER overrides it).
std::size_t default_gh_order(std::size_t n);
/// Largest per-axis order refinement may reach.
std::size_t max_gh_order(std::size_t n);

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  int max_refinements = 4;

  double allowed(double value) const;

  static Tolerance precise() { return {}; }
  /// Two doublings, relative change below 1e-3: the integrability surrogate.
  static Tolerance finiteness() { return {1e-3, 1e-3, 2}; }
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  QuadratureSpec spec;
};

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Probabilists' Gauss-Hermite rule (weights sum to 1). Nodes whose weight
/// underflows below 1e-300 are dropped. Cached; thread-safe.
const Rule& gauss_hermite_rule(std::size_t m);
/// Gauss-Legendre rule on [-1, 1]. Cached; thread-safe.
const Rule& gauss_legendre_rule(std::size_t m);

/// E_M[f]. Refines (order or sample count doubling) until the difference
/// between consecutive levels is within tolerance. Throws NonFinite when a node
/// evaluates to inf/NaN and NoConvergence when refinement is exhausted or when
/// significant mass sits in the far tails.
IntegralResult gauss_expect(const Field& f, const QuadratureSpec& spec, const Tolerance& tol = Tolerance::precise());
IntegralResult gauss_expect(const Expr& f, const QuadratureSpec& spec, const Tolerance& tol = Tolerance::precise());

/// Finiteness probe: nullopt when the expectation is judged divergent
/// (NonFinite, or NoConvergence whose last error exceeds 1e-3 * max(1, |value|)).
std::optional<IntegralResult> try_gauss_expect(const Field& f, const QuadratureSpec& spec,
                                               const Tolerance& tol = Tolerance::finiteness());

/// Integral of f over |x| < R with Lebesgue measure.
IntegralResult lebesgue_integral_ball(const Field& f, double R, const Tolerance& tol = Tolerance::precise(),
                                      std::vector<double> radial_breaks = {});
/// Expression form; radial breaks are taken from indicator-ball radii.
IntegralResult lebesgue_integral_ball(const Expr& f, double R, std::size_t dim,
                                      const Tolerance& tol = Tolerance::precise());

/// x -> integral over [-1,1]^n of f(x - lambda z) omega(z) dz, with omega the
/// normalized bump exp(-1/(1-|z|^2)). `order` is the Gauss-Legendre order per
/// axis (0 picks a default by dimension).
Field mollify(const Field& f, double lambda, std::size_t order = 0);
Field mollify(const Expr& f, std::size_t dim, double lambda, std::size_t order = 0);

/// Integral over the unit ball of exp(-1/(1-|z|^2)) in dimension n.
double bump_mass(std::size_t n);

}  // namespace gaussig
