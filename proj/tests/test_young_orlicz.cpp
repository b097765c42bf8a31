#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gaussig/error.hpp"
#include "gaussig/orlicz.hpp"
#include "gaussig/sampling.hpp"
#include "gaussig/young.hpp"

using namespace gaussig;

namespace {

const Expr x = Expr::coordinate(0);
const QuadratureSpec s1 = QuadratureSpec::gauss_hermite(1);

// Golden-section minimum of a unimodal function on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return f(0.5 * (a + b));
}

// Root of an increasing function on [a, b].
double bisect(const std::function<double(double)>& f, double a, double b) {
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (f(m) < 0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

TEST(Young, ClosedForms) {
  for (double t : {0.0, 0.3, -1.2, 4.0}) {
    const double a = std::fabs(t);
    EXPECT_NEAR(young_eval(YoungKind::CoshMinusOne, t), std::cosh(a) - 1.0, 1e-14 * std::cosh(a));
    EXPECT_NEAR(young_eval(YoungKind::CoshConj, t), a * std::asinh(a) - std::sqrt(1 + a * a) + 1.0, 1e-14 * (1 + a * a));
    EXPECT_NEAR(young_eval(YoungKind::ExpPhi, t), std::exp(a) - 1.0 - a, 1e-14 * std::exp(a));
    EXPECT_NEAR(young_eval(YoungKind::LogPsi, t), (1 + a) * std::log1p(a) - a, 1e-14 * (1 + a * a));
  }
  // No cancellation near 0: the leading Taylor terms.
  EXPECT_NEAR(young_eval(YoungKind::CoshMinusOne, 1e-6) / 5e-13, 1.0, 1e-9);
  EXPECT_NEAR(young_eval(YoungKind::CoshConj, 1e-6) / 5e-13, 1.0, 1e-9);
  EXPECT_NEAR(young_eval(YoungKind::ExpPhi, 1e-6) / 5e-13, 1.0, 1e-6);
  EXPECT_EQ(young_eval(YoungKind::CoshMinusOne, 1e4), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(young_log(YoungKind::CoshMinusOne, 1e4), 1e4 - std::log(2.0), 1e-9);
  EXPECT_EQ(young_log(YoungKind::CoshMinusOne, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(Young, NamesAndConjugates) {
  for (YoungKind y : {YoungKind::CoshMinusOne, YoungKind::CoshConj, YoungKind::ExpPhi, YoungKind::LogPsi}) {
    EXPECT_EQ(young_from_name(young_name(y)), y);
    EXPECT_EQ(conjugate(conjugate(y)), y);
  }
  EXPECT_THROW(young_from_name("cosine"), ConfigError);
}

// The conjugate listed for each Young function is its Legendre transform,
// checked against a brute-force supremum.
TEST(Young, ConjugateIsTheLegendreTransform) {
  for (YoungKind y : {YoungKind::CoshMinusOne, YoungKind::ExpPhi}) {
    for (double s : {0.1, 0.8, 2.5, 7.0}) {
      const double sup = -golden_min([&](double t) { return young_eval(y, t) - s * t; }, 0.0, 20.0);
      EXPECT_NEAR(young_eval(conjugate(y), s), sup, 1e-9 * std::max(1.0, sup)) << young_name(y) << " " << s;
    }
  }
}

TEST(Young, DerivativeMatchesDifferences) {
  for (YoungKind y : {YoungKind::CoshMinusOne, YoungKind::CoshConj, YoungKind::ExpPhi, YoungKind::LogPsi}) {
    for (double t : {0.2, 1.0, 3.0}) {
      const double h = 1e-5;
      const double fd = (young_eval(y, t + h) - young_eval(y, t - h)) / (2 * h);
      EXPECT_NEAR(young_derivative(y, t), fd, 1e-7 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST(Luxemburg, ConstantsAndLinearFunction) {
  for (double c : {0.1, 1.0, 10.0, -3.0}) {
    const LuxemburgNorm n = luxemburg_norm(Expr::constant(c), YoungKind::CoshMinusOne, s1);
    EXPECT_NEAR(n.value, std::fabs(c) / std::acosh(2.0), 1e-7 * std::fabs(c));
    EXPECT_NEAR(n.modular_at_value, 1.0, 1e-4);
  }
  // E cosh(x / rho) - 1 = e^{1/(2 rho^2)} - 1 = 1.
  EXPECT_NEAR(luxemburg_norm(x, YoungKind::CoshMinusOne, s1).value, 1.0 / std::sqrt(2.0 * std::log(2.0)), 1e-8);
  // Mixture norm of a constant solves Y*(c / rho) = 1.
  const double root = bisect([](double u) { return young_eval(YoungKind::CoshConj, u) - 1.0; }, 0.0, 10.0);
  EXPECT_NEAR(luxemburg_norm(Expr::constant(2.0), YoungKind::CoshConj, s1).value, 2.0 / root, 1e-8);
  EXPECT_EQ(luxemburg_norm(Expr::constant(0.0), YoungKind::CoshMinusOne, s1).value, 0.0);
}

TEST(Luxemburg, SquareHasAFiniteExponentialNorm) {
  // E cosh(x^2 / rho) - 1 = (1/sqrt(1 - 2/rho) + 1/sqrt(1 + 2/rho)) / 2 - 1, finite for rho > 2.
  const double rho = bisect(
      [](double r) { return -(0.5 * (1.0 / std::sqrt(1.0 - 2.0 / r) + 1.0 / std::sqrt(1.0 + 2.0 / r)) - 2.0); }, 2.0001,
      50.0);
  EXPECT_NEAR(luxemburg_norm(x * x, YoungKind::CoshMinusOne, s1).value, rho, 1e-6 * rho);
}

TEST(Luxemburg, DivergentModularIsReported) {
  EXPECT_THROW(luxemburg_norm(exp(0.3 * x * x), YoungKind::CoshMinusOne, s1), NoConvergence);
  EXPECT_THROW(modular(exp(x * x), YoungKind::CoshConj, s1), NoConvergence);
}

// Norm axioms as properties over random polynomials.
TEST(Luxemburg, HomogeneityAndTriangleInequality) {
  Rng rng(3);
  for (int i = 0; i < 6; ++i) {
    const Expr f = random_polynomial(rng, 1, 3, 1.0), g = random_polynomial(rng, 1, 3, 1.0);
    const double nf = luxemburg_norm(f, YoungKind::CoshConj, s1).value;
    const double ng = luxemburg_norm(g, YoungKind::CoshConj, s1).value;
    EXPECT_NEAR(luxemburg_norm(-2.5 * f, YoungKind::CoshConj, s1).value, 2.5 * nf, 1e-8 * nf);
    EXPECT_LE(luxemburg_norm(f + g, YoungKind::CoshConj, s1).value, nf + ng + 1e-8);
  }
}

TEST(Orlicz, AmemiyaNormOfConstants) {
  // inf_k (1 + E[(cosh - 1)(k c)]) / k = c inf_u cosh(u) / u.
  const double inf_ratio = golden_min([](double u) { return std::cosh(u) / u; }, 0.1, 5.0);
  for (double c : {0.5, 2.0}) {
    EXPECT_NEAR(orlicz_dual_norm(Expr::constant(c), YoungKind::CoshMinusOne, s1), c * inf_ratio, 1e-7 * c);
  }
}

TEST(Orlicz, NormEquivalenceOnRandomPolynomials) {
  Rng rng(17);
  for (int i = 0; i < 8; ++i) {
    const Expr p = random_polynomial(rng, 1, 2, 0.1);
    const double lux = luxemburg_norm(p, YoungKind::CoshMinusOne, s1).value;
    const double orl = orlicz_dual_norm(p, YoungKind::CoshMinusOne, s1);
    EXPECT_LE(lux, orl + 1e-6 * std::max(1.0, lux)) << p.to_string();
    EXPECT_LE(orl, 2.0 * lux + 1e-6 * std::max(1.0, lux)) << p.to_string();
  }
}

TEST(Lp, GaussianMoments) {
  EXPECT_NEAR(lp_norm(to_field(x, 1), 2.0, s1), 1.0, 1e-10);
  EXPECT_NEAR(lp_norm(to_field(x, 1), 1.0, s1), std::sqrt(2.0 / std::numbers::pi), 1e-10);
  EXPECT_NEAR(lp_norm(to_field(x, 1), 4.0, s1), std::pow(3.0, 0.25), 1e-10);
  EXPECT_THROW(lp_norm(to_field(exp(x * x), 1), 1.0, s1), NoConvergence);
}

TEST(Battery, PointwiseInequalitiesOnLogGrids) {
  const auto grid = logspace(-3.0, 3.0, 200);
  EXPECT_EQ(grid.size(), 200u);
  EXPECT_DOUBLE_EQ(grid.front(), 1e-3);
  for (double a : {0.3, 2.0, 5.0}) EXPECT_TRUE(delta2_check(a, grid).pass) << a;
  EXPECT_TRUE(conjugacy_sandwich_check(logspace(-3.0, 2.5, 200)).pass);
  const CheckReport fy = fenchel_young_check(logspace(-3.0, 1.5, 200), logspace(-3.0, 2.0, 200));
  EXPECT_TRUE(fy.pass) << fy.note;
}

TEST(Battery, FenchelYoungEqualityAtTheDerivative) {
  // Independent evaluation: x sinh x = (cosh x - 1) + Y*(sinh x).
  for (double t : {0.01, 0.5, 2.0, 6.0}) {
    const double lhs = t * std::sinh(t);
    const double rhs = young_eval(YoungKind::CoshMinusOne, t) + young_eval(YoungKind::CoshConj, std::sinh(t));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, lhs));
  }
}

TEST(Inclusion, ChainOfSpaces) {
  EXPECT_TRUE(lebesgue_inclusion_check(x, 1, 2.0, 2.0, s1).pass);
  EXPECT_TRUE(lebesgue_inclusion_check(x * x, 1, 2.0, 2.0, s1).pass);
  // In L log L and L^1 but not in L^2 or the exponential space.
  const CheckReport heavy = lebesgue_inclusion_check(exp(0.3 * x * x), 1, 2.0, 2.0, s1);
  EXPECT_TRUE(heavy.pass) << heavy.note;
}

}  // namespace
