#pragma once

// A type-erased scalar function on R^n with a batch evaluation path.
//
// Expressions, numerically defined functions (mollifications, Mehler
// transforms, convolutions) and derived integrands all travel as Fields so the
// quadrature layer has one input type. One-dimensional fields may carry
// breakpoints: places where the function is not smooth or is singular, which
// the integrators use to split the line.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gaussig/expr.hpp"

namespace gaussig {

class Field {
 public:
  /// coords is coordinate-major: coords[j * count + i] is coordinate j of point i.
  using BatchFn = std::function<void(const double* coords, std::size_t count, double* out)>;

  Field() = default;
  Field(std::size_t dim, BatchFn fn, std::vector<double> breakpoints = {});

  std::size_t dim() const noexcept { return dim_; }
  bool valid() const noexcept { return static_cast<bool>(fn_); }

  void eval(const double* coords, std::size_t count, double* out) const;
  double operator()(std::span<const double> x) const;
  double operator()(std::initializer_list<double> x) const;

  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  Field with_breakpoints(std::vector<double> extra) const;

 private:
  std::size_t dim_ = 0;
  BatchFn fn_;
  std::vector<double> breaks_;
};

/// Wraps an expression; breakpoints are found with kinks_1d when dim == 1.
Field to_field(const Expr& e, std::size_t dim);

Field constant_field(double c, std::size_t dim);

/// Pointwise g(f(x)).
Field map(const Field& f, std::function<double(double)> g);
/// Pointwise g(a(x), b(x)).
Field zip(const Field& a, const Field& b, std::function<double(double, double)> g);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);
Field operator*(double c, const Field& a);
Field operator+(const Field& a, double c);

/// Caches batch results keyed by the exact node coordinates. Useful when the
/// same rule is applied repeatedly to an expensive field (norm bisection).
Field memoize(const Field& f);

/// Zeros of a one-dimensional field on [-bound, bound]: sign changes refined by
/// bisection plus grid points where the value is exactly 0.
std::vector<double> zeros_1d(const Field& f, double bound = 37.0);

/// Restriction f(x) * 1{|x| > R}; adds +-R as breakpoints in one dimension.
Field outside_ball(const Field& f, double R);

}  // namespace gaussig
