#pragma once

// Closed-form scalar functions on R^n as immutable expression trees.
//
// An Expr does not carry a dimension of its own; arity() is the smallest n for
// which every coordinate it reads exists. Evaluating at a point with more
// coordinates is allowed (the function is constant in the extra ones).

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaussig {

enum class Op {
  Constant,
  Coordinate,
  Affine,
  Add,
  Mul,
  Scale,
  Power,
  Abs,
  Exp,
  Log,
  Cosh,
  Sinh,
  Asinh,
  Tanh,
  Sqrt,
  Recip,
  Atan,
  SmoothStep,
  SmoothStepD1,
  Min,
  Max,
  ComposeAffine,
  Bump,
  IndicatorBall,
};

std::string op_name(Op op);

class Expr;

struct Node {
  Op op = Op::Constant;
  // Constant value, Scale factor, Affine offset, Bump radius, IndicatorBall radius.
  double value = 0.0;
  // Coordinate index, Power exponent, Bump order, IndicatorBall dimension.
  unsigned index = 0;
  // Affine coefficients, Bump center, ComposeAffine offset.
  std::vector<double> vec;
  // ComposeAffine matrix, row-major, rows = vec.size(), cols = input arity.
  std::vector<double> matrix;
  std::size_t cols = 0;
  std::vector<Expr> kids;
  std::size_t arity = 0;
};

class Expr {
 public:
  /// The zero constant.
  Expr();

  static Expr constant(double c);
  static Expr coordinate(std::size_t j);
  static Expr affine(std::vector<double> a, double b);
  static Expr bump(std::vector<double> center, double radius, unsigned order = 0);
  static Expr indicator_ball(double radius, std::size_t dimension);

  Op op() const noexcept { return node_->op; }
  const Node& node() const noexcept { return *node_; }
  std::size_t arity() const noexcept { return node_->arity; }

  bool is_constant() const noexcept { return node_->op == Op::Constant; }
  bool is_constant(double c) const noexcept { return is_constant() && node_->value == c; }
  double constant_value() const noexcept { return node_->value; }

  /// Scalar evaluation. Throws DimensionMismatch or DomainError.
  double operator()(std::span<const double> x) const;
  double operator()(std::initializer_list<double> x) const;

  std::string to_string() const;

  /// Same pointer, used for cheap sharing checks.
  bool same_node(const Expr& other) const noexcept { return node_ == other.node_; }

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const Node> node_;
};

// Builders with light simplification (constant folding, neutral elements).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, double c);
Expr operator+(double c, const Expr& a);
Expr operator-(const Expr& a, double c);
Expr operator-(double c, const Expr& a);
Expr operator*(double c, const Expr& a);
Expr operator*(const Expr& a, double c);

Expr scale(double c, const Expr& a);
Expr pow(const Expr& a, unsigned k);
Expr abs(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr cosh(const Expr& a);
Expr sinh(const Expr& a);
Expr asinh(const Expr& a);
Expr tanh(const Expr& a);
Expr sqrt(const Expr& a);
Expr recip(const Expr& a);
Expr atan(const Expr& a);
Expr min(const Expr& a, const Expr& b);
Expr max(const Expr& a, const Expr& b);
/// x -> a(A x + b), A row-major with rows == b.size().
Expr compose_affine(const Expr& a, std::vector<double> matrix, std::vector<double> offset);

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1.
Expr smooth_step(const Expr& t);
/// Derivative of smooth_step with respect to its argument.
Expr smooth_step_d1(const Expr& t);

/// 1 on |x| <= R, 0 on |x| >= 2R, smooth in between (reads coordinates 0..dimension-1).
Expr radial_cutoff(double radius, std::size_t dimension);

double evaluate(const Expr& f, std::span<const double> x);

/// Batch evaluation on a coordinate-major batch: coords[j * count + i] is
/// coordinate j of point i. `dim` must be at least f.arity().
void evaluate_batch(const Expr& f, const double* coords, std::size_t dim, std::size_t count,
                    double* out);

/// Symbolic partial derivative. Throws NotDifferentiable on abs/min/max/indicator
/// and on the second derivative of a smooth step.
Expr derivative(const Expr& f, std::size_t j);
std::vector<Expr> gradient(const Expr& f, std::size_t dim);
Expr laplacian(const Expr& f, std::size_t dim);

/// x -> f(x - h).
Expr translate(const Expr& f, std::span<const double> h);

/// True when no node of f is outside the differentiable class.
bool is_differentiable(const Expr& f);

/// Breakpoints on the real line of a one-dimensional expression: zeros of the
/// arguments of abs/sqrt/log/recip nodes, crossings of min/max and the edges of
/// indicator balls, restricted to [-bound, bound].
std::vector<double> kinks_1d(const Expr& f, double bound = 37.0);

// Polynomial view. Monomials are exponent vectors of length `dim`.
using Monomial = std::vector<unsigned>;
using Polynomial = std::map<Monomial, double>;

/// Expanded polynomial form, or nullopt when f is not a polynomial.
std::optional<Polynomial> to_polynomial(const Expr& f, std::size_t dim);
Expr from_polynomial(const Polynomial& p);
/// Largest absolute coefficient difference.
double polynomial_distance(const Polynomial& a, const Polynomial& b);

/// Probabilists' Hermite polynomial He_k in coordinate j.
Expr hermite(unsigned k, std::size_t j = 0);

}  // namespace gaussig
