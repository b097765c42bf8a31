#include "gaussig/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gaussig/error.hpp"
#include "gaussig/simd.hpp"

namespace gaussig {

namespace detail {

double ipow(double base, unsigned k) {
  double acc = 1.0;
  for (unsigned e = k; e != 0; e >>= 1) {
    if (e & 1u) acc = acc * base;
    base = base * base;
  }
  return acc;
}

double smooth_step_value(double t) {
  if (std::isnan(t)) return t;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = 1.0 / t;
  const double b = 1.0 / (1.0 - t);
  return 1.0 / (1.0 + std::exp(a - b));
}

double smooth_step_d1_value(double t) {
  if (std::isnan(t)) return t;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = 1.0 / t;
  const double b = 1.0 / (1.0 - t);
  const double d = a - b;
  if (std::fabs(d) > 700.0) return 0.0;
  return (a * a + b * b) / (std::exp(d) + 2.0 + std::exp(-d));
}

// e^{-1/(1-s)} (1-s)^{-k}, zero for s >= 1.
double bump_profile(double s, unsigned k) {
  if (std::isnan(s)) return s;
  if (s >= 1.0) return 0.0;
  const double g = 1.0 / (1.0 - s);
  if (k == 0) return std::exp(-g);
  return std::exp(-g + static_cast<double>(k) * std::log(g));
}

}  // namespace detail

namespace {

using detail::ipow;

Expr make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

Expr make_unary(Op op, const Expr& a) {
  Node n;
  n.op = op;
  n.kids = {a};
  n.arity = a.arity();
  return make(std::move(n));
}

Expr make_binary(Op op, const Expr& a, const Expr& b) {
  Node n;
  n.op = op;
  n.kids = {a, b};
  n.arity = std::max(a.arity(), b.arity());
  return make(std::move(n));
}

// Linear view of Constant/Coordinate/Affine nodes.
bool is_linear(const Expr& e) {
  return e.op() == Op::Constant || e.op() == Op::Coordinate || e.op() == Op::Affine;
}

void linear_parts(const Expr& e, std::vector<double>& a, double& b) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Constant:
      a.clear();
      b = n.value;
      break;
    case Op::Coordinate:
      a.assign(n.index + 1, 0.0);
      a[n.index] = 1.0;
      b = 0.0;
      break;
    case Op::Affine:
      a = n.vec;
      b = n.value;
      break;
    default:
      throw Error("linear_parts: not a linear node");
  }
}

Expr linear(std::vector<double> a, double b) {
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  if (a.empty()) return Expr::constant(b);
  if (b == 0.0) {
    std::size_t nonzero = 0, where = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] != 0.0) {
        ++nonzero;
        where = j;
      }
    }
    if (nonzero == 1 && a[where] == 1.0) return Expr::coordinate(where);
  }
  Node n;
  n.op = Op::Affine;
  n.vec = std::move(a);
  n.value = b;
  n.arity = n.vec.size();
  return make(std::move(n));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string vec_string(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

}  // namespace

std::string op_name(Op op) {
  switch (op) {
    case Op::Constant: return "const";
    case Op::Coordinate: return "coord";
    case Op::Affine: return "affine";
    case Op::Add: return "add";
    case Op::Mul: return "mul";
    case Op::Scale: return "scale";
    case Op::Power: return "pow";
    case Op::Abs: return "abs";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Cosh: return "cosh";
    case Op::Sinh: return "sinh";
    case Op::Asinh: return "asinh";
    case Op::Tanh: return "tanh";
    case Op::Sqrt: return "sqrt";
    case Op::Recip: return "recip";
    case Op::Atan: return "atan";
    case Op::SmoothStep: return "smoothstep";
    case Op::SmoothStepD1: return "smoothstep_d1";
    case Op::Min: return "min";
    case Op::Max: return "max";
    case Op::ComposeAffine: return "compose_affine";
    case Op::Bump: return "bump";
    case Op::IndicatorBall: return "indicator_ball";
  }
  return "?";
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double c) {
  Node n;
  n.op = Op::Constant;
  n.value = c;
  return make(std::move(n));
}

Expr Expr::coordinate(std::size_t j) {
  Node n;
  n.op = Op::Coordinate;
  n.index = static_cast<unsigned>(j);
  n.arity = j + 1;
  return make(std::move(n));
}

Expr Expr::affine(std::vector<double> a, double b) {
  Node n;
  n.op = Op::Affine;
  n.arity = a.size();
  n.vec = std::move(a);
  n.value = b;
  return make(std::move(n));
}

Expr Expr::bump(std::vector<double> center, double radius, unsigned order) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  if (center.empty()) throw DimensionMismatch("bump center must be nonempty");
  Node n;
  n.op = Op::Bump;
  n.arity = center.size();
  n.vec = std::move(center);
  n.value = radius;
  n.index = order;
  return make(std::move(n));
}

Expr Expr::indicator_ball(double radius, std::size_t dimension) {
  if (!(radius > 0.0)) throw DomainError("indicator radius must be positive");
  if (dimension == 0) throw DimensionMismatch("indicator dimension must be positive");
  Node n;
  n.op = Op::IndicatorBall;
  n.value = radius;
  n.index = static_cast<unsigned>(dimension);
  n.arity = dimension;
  return make(std::move(n));
}

// ---------------------------------------------------------------- builders

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (is_linear(a) && is_linear(b)) {
    std::vector<double> va, vb;
    double ba = 0.0, bb = 0.0;
    linear_parts(a, va, ba);
    linear_parts(b, vb, bb);
    if (vb.size() > va.size()) va.resize(vb.size(), 0.0);
    for (std::size_t j = 0; j < vb.size(); ++j) va[j] += vb[j];
    return linear(std::move(va), ba + bb);
  }
  return make_binary(Op::Add, a, b);
}

Expr operator-(const Expr& a) { return scale(-1.0, a); }
Expr operator-(const Expr& a, const Expr& b) { return a + scale(-1.0, b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant()) return scale(a.constant_value(), b);
  if (b.is_constant()) return scale(b.constant_value(), a);
  return make_binary(Op::Mul, a, b);
}

Expr operator+(const Expr& a, double c) { return a + Expr::constant(c); }
Expr operator+(double c, const Expr& a) { return Expr::constant(c) + a; }
Expr operator-(const Expr& a, double c) { return a + Expr::constant(-c); }
Expr operator-(double c, const Expr& a) { return Expr::constant(c) - a; }
Expr operator*(double c, const Expr& a) { return scale(c, a); }
Expr operator*(const Expr& a, double c) { return scale(c, a); }

Expr scale(double c, const Expr& a) {
  if (c == 1.0) return a;
  if (c == 0.0) return Expr::constant(0.0);
  if (a.is_constant()) return Expr::constant(c * a.constant_value());
  if (is_linear(a)) {
    std::vector<double> v;
    double b = 0.0;
    linear_parts(a, v, b);
    for (double& x : v) x *= c;
    return linear(std::move(v), b * c);
  }
  if (a.op() == Op::Scale) return scale(c * a.node().value, a.node().kids[0]);
  Node n;
  n.op = Op::Scale;
  n.value = c;
  n.kids = {a};
  n.arity = a.arity();
  return make(std::move(n));
}

Expr pow(const Expr& a, unsigned k) {
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (a.is_constant()) return Expr::constant(ipow(a.constant_value(), k));
  if (a.op() == Op::Power) return pow(a.node().kids[0], a.node().index * k);
  Node n;
  n.op = Op::Power;
  n.index = k;
  n.kids = {a};
  n.arity = a.arity();
  return make(std::move(n));
}

Expr abs(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::fabs(a.constant_value()));
  if (a.op() == Op::Abs) return a;
  return make_unary(Op::Abs, a);
}

Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::exp(a.constant_value()));
  return make_unary(Op::Exp, a);
}

Expr log(const Expr& a) {
  if (a.is_constant() && a.constant_value() > 0.0) return Expr::constant(std::log(a.constant_value()));
  return make_unary(Op::Log, a);
}

Expr cosh(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::cosh(a.constant_value()));
  return make_unary(Op::Cosh, a);
}

Expr sinh(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::sinh(a.constant_value()));
  return make_unary(Op::Sinh, a);
}

Expr asinh(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::asinh(a.constant_value()));
  return make_unary(Op::Asinh, a);
}

Expr tanh(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::tanh(a.constant_value()));
  return make_unary(Op::Tanh, a);
}

Expr sqrt(const Expr& a) {
  if (a.is_constant() && a.constant_value() >= 0.0) return Expr::constant(std::sqrt(a.constant_value()));
  return make_unary(Op::Sqrt, a);
}

Expr recip(const Expr& a) {
  if (a.is_constant() && a.constant_value() != 0.0) return Expr::constant(1.0 / a.constant_value());
  return make_unary(Op::Recip, a);
}

Expr atan(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::atan(a.constant_value()));
  return make_unary(Op::Atan, a);
}

Expr smooth_step(const Expr& t) {
  if (t.is_constant()) return Expr::constant(detail::smooth_step_value(t.constant_value()));
  return make_unary(Op::SmoothStep, t);
}

Expr smooth_step_d1(const Expr& t) {
  if (t.is_constant()) return Expr::constant(detail::smooth_step_d1_value(t.constant_value()));
  return make_unary(Op::SmoothStepD1, t);
}

Expr min(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.constant_value() < b.constant_value() ? a.constant_value() : b.constant_value());
  }
  return make_binary(Op::Min, a, b);
}

Expr max(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.constant_value() > b.constant_value() ? a.constant_value() : b.constant_value());
  }
  return make_binary(Op::Max, a, b);
}

Expr compose_affine(const Expr& a, std::vector<double> matrix, std::vector<double> offset) {
  const std::size_t rows = offset.size();
  if (rows == 0) {
    if (a.arity() != 0) throw DimensionMismatch("compose_affine: empty map for a non-constant expression");
    return a;
  }
  if (matrix.size() % rows != 0) throw DimensionMismatch("compose_affine: matrix shape does not match offset");
  const std::size_t cols = matrix.size() / rows;
  if (a.arity() > rows) throw DimensionMismatch("compose_affine: map has fewer outputs than the expression reads");
  if (a.is_constant()) return a;

  if (is_linear(a)) {
    std::vector<double> v;
    double b = 0.0;
    linear_parts(a, v, b);
    std::vector<double> out(cols, 0.0);
    double off = b;
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) out[j] += v[i] * matrix[i * cols + j];
      off += v[i] * offset[i];
    }
    return linear(std::move(out), off);
  }

  if (a.op() == Op::ComposeAffine) {
    // a = c(A2 y + b2), y = A1 x + b1  ->  c((A2 A1) x + A2 b1 + b2)
    const Node& in = a.node();
    const std::size_t r2 = in.vec.size();
    const std::size_t c2 = in.cols;  // == rows of the outer map (or fewer)
    std::vector<double> m(r2 * cols, 0.0), o(in.vec);
    for (std::size_t i = 0; i < r2; ++i) {
      for (std::size_t k = 0; k < c2 && k < rows; ++k) {
        const double aik = in.matrix[i * c2 + k];
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) m[i * cols + j] += aik * matrix[k * cols + j];
        o[i] += aik * offset[k];
      }
    }
    return compose_affine(in.kids[0], std::move(m), std::move(o));
  }

  // Identity map with zero offset is a no-op.
  if (rows == cols) {
    bool identity = true;
    for (std::size_t i = 0; i < rows && identity; ++i) {
      if (offset[i] != 0.0) identity = false;
      for (std::size_t j = 0; j < cols && identity; ++j) {
        if (matrix[i * cols + j] != (i == j ? 1.0 : 0.0)) identity = false;
      }
    }
    if (identity) return a;
  }

  Node n;
  n.op = Op::ComposeAffine;
  n.kids = {a};
  n.matrix = std::move(matrix);
  n.vec = std::move(offset);
  n.cols = cols;
  n.arity = cols;
  return make(std::move(n));
}

Expr radial_cutoff(double radius, std::size_t dimension) {
  if (!(radius > 0.0)) throw DomainError("cutoff radius must be positive");
  Expr r2 = Expr::constant(0.0);
  for (std::size_t j = 0; j < dimension; ++j) r2 = r2 + pow(Expr::coordinate(j), 2);
  const double R2 = radius * radius;
  return smooth_step(scale(-1.0 / (3.0 * R2), r2) + 4.0 / 3.0);
}

// ---------------------------------------------------------------- evaluation

namespace {

double eval_node(const Node& n, const double* x);

double eval_kid(const Node& n, std::size_t i, const double* x) { return eval_node(n.kids[i].node(), x); }

double eval_node(const Node& n, const double* x) {
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Coordinate: return x[n.index];
    case Op::Affine: {
      double s = n.value;
      for (std::size_t j = 0; j < n.vec.size(); ++j) s = s + n.vec[j] * x[j];
      return s;
    }
    case Op::Add: return eval_kid(n, 0, x) + eval_kid(n, 1, x);
    case Op::Mul: return eval_kid(n, 0, x) * eval_kid(n, 1, x);
    case Op::Scale: return eval_kid(n, 0, x) * n.value;
    case Op::Power: return ipow(eval_kid(n, 0, x), n.index);
    case Op::Abs: return std::fabs(eval_kid(n, 0, x));
    case Op::Exp: return std::exp(eval_kid(n, 0, x));
    case Op::Log: {
      const double v = eval_kid(n, 0, x);
      if (!(v > 0.0)) throw DomainError("log of a non-positive value");
      return std::log(v);
    }
    case Op::Cosh: return std::cosh(eval_kid(n, 0, x));
    case Op::Sinh: return std::sinh(eval_kid(n, 0, x));
    case Op::Asinh: return std::asinh(eval_kid(n, 0, x));
    case Op::Tanh: return std::tanh(eval_kid(n, 0, x));
    case Op::Sqrt: {
      const double v = eval_kid(n, 0, x);
      if (!(v >= 0.0)) throw DomainError("sqrt of a negative value");
      return std::sqrt(v);
    }
    case Op::Recip: {
      const double v = eval_kid(n, 0, x);
      if (v == 0.0 || std::isnan(v)) throw DomainError("reciprocal of zero");
      return 1.0 / v;
    }
    case Op::Atan: return std::atan(eval_kid(n, 0, x));
    case Op::SmoothStep: return detail::smooth_step_value(eval_kid(n, 0, x));
    case Op::SmoothStepD1: return detail::smooth_step_d1_value(eval_kid(n, 0, x));
    case Op::Min: {
      const double a = eval_kid(n, 0, x), b = eval_kid(n, 1, x);
      return a < b ? a : b;
    }
    case Op::Max: {
      const double a = eval_kid(n, 0, x), b = eval_kid(n, 1, x);
      return a > b ? a : b;
    }
    case Op::ComposeAffine: {
      const std::size_t rows = n.vec.size();
      double stack_buf[8];
      std::vector<double> heap;
      double* y = stack_buf;
      if (rows > 8) {
        heap.resize(rows);
        y = heap.data();
      }
      for (std::size_t i = 0; i < rows; ++i) {
        double s = n.vec[i];
        for (std::size_t j = 0; j < n.cols; ++j) s = s + n.matrix[i * n.cols + j] * x[j];
        y[i] = s;
      }
      return eval_node(n.kids[0].node(), y);
    }
    case Op::Bump: {
      double s = 0.0;
      for (std::size_t j = 0; j < n.vec.size(); ++j) {
        const double d = x[j] - n.vec[j];
        s = s + d * d;
      }
      return detail::bump_profile(s / (n.value * n.value), n.index);
    }
    case Op::IndicatorBall: {
      double s = 0.0;
      for (std::size_t j = 0; j < n.index; ++j) s = s + x[j] * x[j];
      return s < n.value * n.value ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

using Buffer = std::vector<double>;

void eval_batch_node(const Node& n, const double* coords, std::size_t count, double* out);

Buffer eval_kid_batch(const Node& n, std::size_t i, const double* coords, std::size_t count) {
  Buffer b(count);
  eval_batch_node(n.kids[i].node(), coords, count, b.data());
  return b;
}

template <class F>
void map_unary(const Node& n, const double* coords, std::size_t count, double* out, F f) {
  eval_batch_node(n.kids[0].node(), coords, count, out);
  for (std::size_t i = 0; i < count; ++i) out[i] = f(out[i]);
}

void eval_batch_node(const Node& n, const double* coords, std::size_t count, double* out) {
  const simd::KernelTable& k = simd::active();
  switch (n.op) {
    case Op::Constant: std::fill(out, out + count, n.value); return;
    case Op::Coordinate: std::copy(coords + n.index * count, coords + (n.index + 1) * count, out); return;
    case Op::Affine:
      std::fill(out, out + count, n.value);
      for (std::size_t j = 0; j < n.vec.size(); ++j) k.axpy(n.vec[j], coords + j * count, out, count);
      return;
    case Op::Add: {
      eval_batch_node(n.kids[0].node(), coords, count, out);
      Buffer b = eval_kid_batch(n, 1, coords, count);
      k.add(out, b.data(), out, count);
      return;
    }
    case Op::Mul: {
      eval_batch_node(n.kids[0].node(), coords, count, out);
      Buffer b = eval_kid_batch(n, 1, coords, count);
      k.mul(out, b.data(), out, count);
      return;
    }
    case Op::Scale:
      eval_batch_node(n.kids[0].node(), coords, count, out);
      k.scale(out, n.value, out, count);
      return;
    case Op::Power:
      eval_batch_node(n.kids[0].node(), coords, count, out);
      k.ipow(out, n.index, out, count);
      return;
    case Op::Abs:
      eval_batch_node(n.kids[0].node(), coords, count, out);
      k.abs(out, out, count);
      return;
    case Op::Exp: map_unary(n, coords, count, out, [](double v) { return std::exp(v); }); return;
    case Op::Log:
      map_unary(n, coords, count, out, [](double v) {
        if (!(v > 0.0)) throw DomainError("log of a non-positive value");
        return std::log(v);
      });
      return;
    case Op::Cosh: map_unary(n, coords, count, out, [](double v) { return std::cosh(v); }); return;
    case Op::Sinh: map_unary(n, coords, count, out, [](double v) { return std::sinh(v); }); return;
    case Op::Asinh: map_unary(n, coords, count, out, [](double v) { return std::asinh(v); }); return;
    case Op::Tanh: map_unary(n, coords, count, out, [](double v) { return std::tanh(v); }); return;
    case Op::Sqrt:
      map_unary(n, coords, count, out, [](double v) {
        if (!(v >= 0.0)) throw DomainError("sqrt of a negative value");
        return std::sqrt(v);
      });
      return;
    case Op::Recip:
      map_unary(n, coords, count, out, [](double v) {
        if (v == 0.0 || std::isnan(v)) throw DomainError("reciprocal of zero");
        return 1.0 / v;
      });
      return;
    case Op::Atan: map_unary(n, coords, count, out, [](double v) { return std::atan(v); }); return;
    case Op::SmoothStep: map_unary(n, coords, count, out, detail::smooth_step_value); return;
    case Op::SmoothStepD1: map_unary(n, coords, count, out, detail::smooth_step_d1_value); return;
    case Op::Min: {
      eval_batch_node(n.kids[0].node(), coords, count, out);
      Buffer b = eval_kid_batch(n, 1, coords, count);
      k.min(out, b.data(), out, count);
      return;
    }
    case Op::Max: {
      eval_batch_node(n.kids[0].node(), coords, count, out);
      Buffer b = eval_kid_batch(n, 1, coords, count);
      k.max(out, b.data(), out, count);
      return;
    }
    case Op::ComposeAffine: {
      const std::size_t rows = n.vec.size();
      Buffer y(rows * count);
      for (std::size_t i = 0; i < rows; ++i) {
        double* yi = y.data() + i * count;
        std::fill(yi, yi + count, n.vec[i]);
        for (std::size_t j = 0; j < n.cols; ++j) k.axpy(n.matrix[i * n.cols + j], coords + j * count, yi, count);
      }
      eval_batch_node(n.kids[0].node(), y.data(), count, out);
      return;
    }
    case Op::Bump: {
      const double r2 = n.value * n.value;
      for (std::size_t i = 0; i < count; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n.vec.size(); ++j) {
          const double d = coords[j * count + i] - n.vec[j];
          s = s + d * d;
        }
        out[i] = detail::bump_profile(s / r2, n.index);
      }
      return;
    }
    case Op::IndicatorBall: {
      const double R2 = n.value * n.value;
      for (std::size_t i = 0; i < count; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n.index; ++j) s = s + coords[j * count + i] * coords[j * count + i];
        out[i] = s < R2 ? 1.0 : 0.0;
      }
      return;
    }
  }
}

}  // namespace

double evaluate(const Expr& f, std::span<const double> x) {
  if (x.size() < f.arity()) {
    throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, expression reads " +
                            std::to_string(f.arity()));
  }
  return eval_node(f.node(), x.data());
}

double Expr::operator()(std::span<const double> x) const { return evaluate(*this, x); }

double Expr::operator()(std::initializer_list<double> x) const {
  return evaluate(*this, std::span<const double>(x.begin(), x.size()));
}

void evaluate_batch(const Expr& f, const double* coords, std::size_t dim, std::size_t count, double* out) {
  if (dim < f.arity()) {
    throw DimensionMismatch("batch has " + std::to_string(dim) + " coordinates, expression reads " +
                            std::to_string(f.arity()));
  }
  if (count == 0) return;
  eval_batch_node(f.node(), coords, count, out);
}

// ---------------------------------------------------------------- derivatives

Expr derivative(const Expr& f, std::size_t j) {
  if (f.arity() <= j) return Expr::constant(0.0);
  const Node& n = f.node();
  auto d0 = [&]() { return derivative(n.kids[0], j); };
  switch (n.op) {
    case Op::Constant: return Expr::constant(0.0);
    case Op::Coordinate: return Expr::constant(n.index == j ? 1.0 : 0.0);
    case Op::Affine: return Expr::constant(j < n.vec.size() ? n.vec[j] : 0.0);
    case Op::Add: return derivative(n.kids[0], j) + derivative(n.kids[1], j);
    case Op::Mul: return derivative(n.kids[0], j) * n.kids[1] + n.kids[0] * derivative(n.kids[1], j);
    case Op::Scale: return scale(n.value, d0());
    case Op::Power: return scale(static_cast<double>(n.index), pow(n.kids[0], n.index - 1)) * d0();
    case Op::Exp: return f * d0();
    case Op::Log: return recip(n.kids[0]) * d0();
    case Op::Cosh: return sinh(n.kids[0]) * d0();
    case Op::Sinh: return cosh(n.kids[0]) * d0();
    case Op::Asinh: return recip(sqrt(1.0 + pow(n.kids[0], 2))) * d0();
    case Op::Tanh: return (1.0 - pow(f, 2)) * d0();
    case Op::Sqrt: return scale(0.5, recip(f)) * d0();
    case Op::Recip: return -pow(f, 2) * d0();
    case Op::Atan: return recip(1.0 + pow(n.kids[0], 2)) * d0();
    case Op::SmoothStep: return smooth_step_d1(n.kids[0]) * d0();
    case Op::SmoothStepD1: throw NotDifferentiable("second derivative of a smooth step is not available");
    case Op::Abs: throw NotDifferentiable("abs is not differentiable");
    case Op::Min: throw NotDifferentiable("min is not differentiable");
    case Op::Max: throw NotDifferentiable("max is not differentiable");
    case Op::IndicatorBall: throw NotDifferentiable("indicator is not differentiable");
    case Op::ComposeAffine: {
      Expr acc = Expr::constant(0.0);
      const std::size_t rows = n.vec.size();
      for (std::size_t i = 0; i < rows; ++i) {
        const double aij = n.matrix[i * n.cols + j];
        if (aij == 0.0) continue;
        Expr di = derivative(n.kids[0], i);
        if (di.is_constant(0.0)) continue;
        acc = acc + scale(aij, compose_affine(di, n.matrix, n.vec));
      }
      return acc;
    }
    case Op::Bump: {
      if (j >= n.vec.size()) return Expr::constant(0.0);
      const double r2 = n.value * n.value;
      std::vector<double> a(j + 1, 0.0);
      a[j] = 2.0 / r2;
      Expr radial = Expr::affine(std::move(a), -2.0 * n.vec[j] / r2);
      Expr next = Expr::bump(n.vec, n.value, n.index + 2);
      Expr inner = n.index == 0 ? -next : scale(static_cast<double>(n.index), Expr::bump(n.vec, n.value, n.index + 1)) - next;
      return radial * inner;
    }
  }
  return Expr::constant(0.0);
}

std::vector<Expr> gradient(const Expr& f, std::size_t dim) {
  std::vector<Expr> g;
  g.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) g.push_back(derivative(f, j));
  return g;
}

Expr laplacian(const Expr& f, std::size_t dim) {
  Expr acc = Expr::constant(0.0);
  for (std::size_t j = 0; j < dim; ++j) acc = acc + derivative(derivative(f, j), j);
  return acc;
}

Expr translate(const Expr& f, std::span<const double> h) {
  const std::size_t n = h.size();
  if (n < f.arity()) {
    throw DimensionMismatch("shift has " + std::to_string(n) + " components, expression reads " +
                            std::to_string(f.arity()));
  }
  std::vector<double> m(n * n, 0.0), off(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i * n + i] = 1.0;
    off[i] = -h[i];
  }
  return compose_affine(f, std::move(m), std::move(off));
}

bool is_differentiable(const Expr& f) {
  switch (f.op()) {
    case Op::Abs:
    case Op::Min:
    case Op::Max:
    case Op::IndicatorBall:
      return false;
    default:
      break;
  }
  for (const Expr& k : f.node().kids) {
    if (!is_differentiable(k)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- kinks

namespace {

using Scalar1d = std::function<double(double)>;

double safe_call(const Scalar1d& g, double x) {
  try {
    return g(x);
  } catch (const Error&) {
    return std::nan("");
  }
}

void zeros_of(const Scalar1d& g, double bound, std::vector<double>& out) {
  constexpr int half = 2000;
  const double step = bound / half;
  std::vector<double> xs(2 * half + 1), gs(2 * half + 1);
  for (int i = -half; i <= half; ++i) {
    xs[i + half] = i * step;
    gs[i + half] = safe_call(g, i * step);
  }
  // Where |g| stays below rounding noise of its own scale (1 - tanh^2 far out,
  // underflowed tails) the grid sees noise, not bends.
  double scale = 0.0;
  for (double v : gs) {
    if (std::isfinite(v)) scale = std::max(scale, std::fabs(v));
  }
  const double noise = 1e-13 * scale;
  auto quiet = [&](std::size_t i) { return std::isfinite(gs[i]) && std::fabs(gs[i]) <= noise; };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool quiet_around = i > 0 && i + 1 < xs.size() && quiet(i - 1) && quiet(i + 1);
    if (gs[i] == 0.0) {
      if (!quiet_around) out.push_back(xs[i]);
      continue;
    }
    if (quiet_around) continue;
    if (i + 1 < xs.size() && std::isfinite(gs[i]) && std::isfinite(gs[i + 1]) && gs[i + 1] != 0.0 &&
        std::signbit(gs[i]) != std::signbit(gs[i + 1])) {
      double lo = xs[i], hi = xs[i + 1], glo = gs[i];
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = safe_call(g, mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(gm) == std::signbit(glo)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
      continue;
    }
    // Touching zero without a sign change (e.g. log of a square).
    if (i > 0 && i + 1 < xs.size() && std::isfinite(gs[i]) && std::fabs(gs[i]) < 1e-6 &&
        std::fabs(gs[i]) <= std::fabs(gs[i - 1]) && std::fabs(gs[i]) <= std::fabs(gs[i + 1])) {
      double a = xs[i - 1], b = xs[i + 1];
      const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double c = b - invphi * (b - a), d = a + invphi * (b - a);
        if (std::fabs(safe_call(g, c)) < std::fabs(safe_call(g, d))) {
          b = d;
        } else {
          a = c;
        }
      }
      const double xm = 0.5 * (a + b);
      if (std::fabs(safe_call(g, xm)) < 1e-10) out.push_back(xm);
    }
  }
}

// Walks the tree carrying the affine map from the global line to the local
// coordinates of the current node: local_i = p_i x + q_i.
void walk_kinks(const Expr& e, const std::vector<double>& p, const std::vector<double>& q, double bound,
                std::vector<double>& out) {
  const Node& n = e.node();
  auto local_eval = [&p, &q](const Expr& sub) {
    return [sub, p, q](double x) {
      std::vector<double> y(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) y[i] = p[i] * x + q[i];
      return evaluate(sub, y);
    };
  };
  switch (n.op) {
    case Op::Abs:
    case Op::Sqrt:
    case Op::Log:
    case Op::Recip:
      zeros_of(local_eval(n.kids[0]), bound, out);
      break;
    case Op::SmoothStep:
    case Op::SmoothStepD1: {
      auto g = local_eval(n.kids[0]);
      zeros_of(g, bound, out);
      zeros_of([g](double x) { return g(x) - 1.0; }, bound, out);
      break;
    }
    case Op::Min:
    case Op::Max: {
      auto a = local_eval(n.kids[0]);
      auto b = local_eval(n.kids[1]);
      zeros_of([a, b](double x) { return a(x) - b(x); }, bound, out);
      break;
    }
    case Op::IndicatorBall:
    case Op::Bump: {
      const bool ball = n.op == Op::IndicatorBall;
      const std::size_t d = ball ? n.index : n.vec.size();
      const double R = n.value;
      auto pp = p, qq = q;
      auto center = n.vec;
      zeros_of(
          [pp, qq, d, R, ball, center](double x) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
              const double yi = (i < pp.size() ? pp[i] * x + qq[i] : 0.0) - (ball ? 0.0 : center[i]);
              s += yi * yi;
            }
            return s - R * R;
          },
          bound, out);
      break;
    }
    default:
      break;
  }
  if (n.op == Op::ComposeAffine) {
    const std::size_t rows = n.vec.size();
    std::vector<double> p2(rows), q2(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      double a = 0.0, b = n.vec[i];
      for (std::size_t j = 0; j < n.cols && j < p.size(); ++j) {
        a += n.matrix[i * n.cols + j] * p[j];
        b += n.matrix[i * n.cols + j] * q[j];
      }
      p2[i] = a;
      q2[i] = b;
    }
    walk_kinks(n.kids[0], p2, q2, bound, out);
    return;
  }
  for (const Expr& k : n.kids) walk_kinks(k, p, q, bound, out);
}

}  // namespace

std::vector<double> kinks_1d(const Expr& f, double bound) {
  if (f.arity() > 1) throw DimensionMismatch("kinks_1d needs a one-dimensional expression");
  std::vector<double> out;
  walk_kinks(f, {1.0}, {0.0}, bound, out);
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double x : out) {
    if (std::fabs(x) > bound) continue;
    if (uniq.empty() || std::fabs(x - uniq.back()) > 1e-12 * std::max(1.0, std::fabs(x))) uniq.push_back(x);
  }
  return uniq;
}

// ---------------------------------------------------------------- polynomials

namespace {

Polynomial poly_const(double c, std::size_t dim) {
  Polynomial p;
  if (c != 0.0) p[Monomial(dim, 0)] = c;
  return p;
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b, double cb = 1.0) {
  Polynomial r = a;
  for (const auto& [m, c] : b) {
    double& slot = r[m];
    slot += cb * c;
    if (slot == 0.0) r.erase(m);
  }
  return r;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m(ma.size());
      for (std::size_t j = 0; j < m.size(); ++j) m[j] = ma[j] + mb[j];
      r[m] += ca * cb;
    }
  }
  for (auto it = r.begin(); it != r.end();) {
    if (it->second == 0.0) {
      it = r.erase(it);
    } else {
      ++it;
    }
  }
  return r;
}

Polynomial poly_pow(const Polynomial& a, unsigned k, std::size_t dim) {
  Polynomial r = poly_const(1.0, dim);
  for (unsigned i = 0; i < k; ++i) r = poly_mul(r, a);
  return r;
}

std::optional<Polynomial> poly_of(const Expr& f, std::size_t dim) {
  const Node& n = f.node();
  switch (n.op) {
    case Op::Constant: return poly_const(n.value, dim);
    case Op::Coordinate: {
      Monomial m(dim, 0);
      m[n.index] = 1;
      return Polynomial{{m, 1.0}};
    }
    case Op::Affine: {
      Polynomial p = poly_const(n.value, dim);
      for (std::size_t j = 0; j < n.vec.size(); ++j) {
        if (n.vec[j] == 0.0) continue;
        Monomial m(dim, 0);
        m[j] = 1;
        p[m] = n.vec[j];
      }
      return p;
    }
    case Op::Add: {
      auto a = poly_of(n.kids[0], dim), b = poly_of(n.kids[1], dim);
      if (!a || !b) return std::nullopt;
      return poly_add(*a, *b);
    }
    case Op::Mul: {
      auto a = poly_of(n.kids[0], dim), b = poly_of(n.kids[1], dim);
      if (!a || !b) return std::nullopt;
      return poly_mul(*a, *b);
    }
    case Op::Scale: {
      auto a = poly_of(n.kids[0], dim);
      if (!a) return std::nullopt;
      return poly_add(Polynomial{}, *a, n.value);
    }
    case Op::Power: {
      auto a = poly_of(n.kids[0], dim);
      if (!a) return std::nullopt;
      return poly_pow(*a, n.index, dim);
    }
    case Op::ComposeAffine: {
      const std::size_t rows = n.vec.size();
      auto inner = poly_of(n.kids[0], rows);
      if (!inner) return std::nullopt;
      std::vector<Polynomial> ys(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        Polynomial y = poly_const(n.vec[i], dim);
        for (std::size_t j = 0; j < n.cols; ++j) {
          const double a = n.matrix[i * n.cols + j];
          if (a == 0.0) continue;
          Monomial m(dim, 0);
          m[j] = 1;
          y = poly_add(y, Polynomial{{m, a}});
        }
        ys[i] = std::move(y);
      }
      Polynomial r;
      for (const auto& [m, c] : *inner) {
        Polynomial term = poly_const(c, dim);
        for (std::size_t i = 0; i < rows; ++i) term = poly_mul(term, poly_pow(ys[i], m[i], dim));
        r = poly_add(r, term);
      }
      return r;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<Polynomial> to_polynomial(const Expr& f, std::size_t dim) {
  if (dim < f.arity()) throw DimensionMismatch("to_polynomial: dimension smaller than expression arity");
  return poly_of(f, dim);
}

Expr from_polynomial(const Polynomial& p) {
  Expr acc = Expr::constant(0.0);
  for (const auto& [m, c] : p) {
    Expr term = Expr::constant(c);
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] != 0) term = term * pow(Expr::coordinate(j), m[j]);
    }
    acc = acc + term;
  }
  return acc;
}

double polynomial_distance(const Polynomial& a, const Polynomial& b) {
  double worst = 0.0;
  for (const auto& [m, c] : poly_add(a, b, -1.0)) worst = std::max(worst, std::fabs(c));
  return worst;
}

Expr hermite(unsigned k, std::size_t j) {
  const std::size_t dim = j + 1;
  Monomial mx(dim, 0);
  mx[j] = 1;
  const Polynomial x{{mx, 1.0}};
  Polynomial prev = poly_const(1.0, dim);
  if (k == 0) return from_polynomial(prev);
  Polynomial cur = x;
  for (unsigned i = 1; i < k; ++i) {
    Polynomial next = poly_add(poly_mul(x, cur), prev, -static_cast<double>(i));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return from_polynomial(cur);
}

// ---------------------------------------------------------------- printing

std::string Expr::to_string() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Constant: return fmt(n.value);
    case Op::Coordinate: return "x" + std::to_string(n.index);
    case Op::Affine: {
      std::string s = "(" + fmt(n.value);
      for (std::size_t j = 0; j < n.vec.size(); ++j) {
        if (n.vec[j] != 0.0) s += " + " + fmt(n.vec[j]) + "*x" + std::to_string(j);
      }
      return s + ")";
    }
    case Op::Add: return "(" + n.kids[0].to_string() + " + " + n.kids[1].to_string() + ")";
    case Op::Mul: return n.kids[0].to_string() + "*" + n.kids[1].to_string();
    case Op::Scale: return fmt(n.value) + "*" + n.kids[0].to_string();
    case Op::Power: return n.kids[0].to_string() + "^" + std::to_string(n.index);
    case Op::Min:
    case Op::Max: return op_name(n.op) + "(" + n.kids[0].to_string() + ", " + n.kids[1].to_string() + ")";
    case Op::ComposeAffine:
      return n.kids[0].to_string() + "@affine(" + vec_string(n.matrix) + ", " + vec_string(n.vec) + ")";
    case Op::Bump:
      return "bump" + std::to_string(n.index) + "(" + vec_string(n.vec) + ", " + fmt(n.value) + ")";
    case Op::IndicatorBall: return "1{|x|<" + fmt(n.value) + "}";
    default: return op_name(n.op) + "(" + n.kids[0].to_string() + ")";
  }
}

}  // namespace gaussig
