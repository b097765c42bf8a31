#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gaussig/error.hpp"
#include "gaussig/quadrature.hpp"

using namespace gaussig;

namespace {

const Expr x = Expr::coordinate(0);
const Expr y = Expr::coordinate(1);

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

// Composite Simpson on [a, b], the test's own oracle for one-dimensional integrals.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

TEST(Rules, GaussHermiteIsAProbabilityRule) {
  for (std::size_t m : {2u, 8u, 64u, 256u}) {
    const Rule& r = gauss_hermite_rule(m);
    double mass = 0.0, second = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      mass += r.weights[i];
      second += r.weights[i] * r.nodes[i] * r.nodes[i];
    }
    EXPECT_NEAR(mass, 1.0, 1e-13) << m;
    EXPECT_NEAR(second, 1.0, 1e-12) << m;
  }
  const Rule& gl = gauss_legendre_rule(10);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 18);
  EXPECT_NEAR(s, 2.0 / 19.0, 1e-14);
}

TEST(GaussExpect, EvenMomentsAreDoubleFactorials) {
  const QuadratureSpec spec = QuadratureSpec::gauss_hermite(1);
  for (unsigned k = 0; k <= 6; ++k) {
    const IntegralResult r = gauss_expect(pow(x, 2 * k), spec);
    EXPECT_NEAR(r.value, double_factorial(2 * k - 1), 1e-9 * double_factorial(2 * k - 1)) << k;
    EXPECT_NEAR(gauss_expect(pow(x, 2 * k + 1), spec).value, 0.0, 1e-10);
  }
}

TEST(GaussExpect, ExponentialMomentsInOneAndTwoDimensions) {
  for (double theta : {-1.5, 0.3, 2.0}) {
    EXPECT_NEAR(gauss_expect(exp(theta * x), QuadratureSpec::gauss_hermite(1)).value, std::exp(theta * theta / 2),
                1e-10 * std::exp(theta * theta / 2));
  }
  const IntegralResult r = gauss_expect(exp(0.5 * x - 0.25 * y), QuadratureSpec::gauss_hermite(2));
  EXPECT_NEAR(r.value, std::exp(0.5 * (0.25 + 0.0625)), 1e-10);
  const IntegralResult c = gauss_expect(cosh(x) * cosh(y) * tanh(x + 0.1), QuadratureSpec::gauss_hermite(2));
  // Independent oracle: product structure is broken by tanh, so integrate by Simpson in x.
  const double phi_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double oracle = std::exp(0.5) * simpson([&](double t) { return std::cosh(t) * std::tanh(t + 0.1) * phi_norm * std::exp(-t * t / 2); }, -14.0, 14.0);
  EXPECT_NEAR(c.value, oracle, 1e-9);
}

TEST(GaussExpect, KinkedIntegrandsUseThePiecewiseRule) {
  const IntegralResult r = gauss_expect(abs(x), QuadratureSpec::gauss_hermite(1));
  EXPECT_NEAR(r.value, std::sqrt(2.0 / std::numbers::pi), 1e-12);
  EXPECT_EQ(r.spec.scheme, Scheme::Piecewise1d);
  const IntegralResult m = gauss_expect(max(x, Expr::constant(1.0)), QuadratureSpec::gauss_hermite(1));
  // E max(x, 1) = 1 + E (x - 1)^+ = 1 + phi(1) - (1 - Phi(1)).
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(m.value, 1.0 + phi1 - 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-11);
}

TEST(GaussExpect, SteepSigmoidConverges) {
  const Expr d = derivative(tanh(3.0 * x), 0);
  const double phi_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double oracle = simpson([&](double t) { return 3.0 / std::pow(std::cosh(3.0 * t), 2) * phi_norm * std::exp(-t * t / 2); }, -12.0, 12.0, 200000);
  EXPECT_NEAR(gauss_expect(d, QuadratureSpec::gauss_hermite(1)).value, oracle, 1e-10);
}

TEST(GaussExpect, QmcIsDeterministicAndAccurate) {
  const QuadratureSpec spec = QuadratureSpec::qmc(5, 1 << 14, 7);
  const Expr f = Expr::affine({1, 1, 1, 1, 1}, 0.0);
  const Expr g = f * f;  // E = 5
  const IntegralResult a = gauss_expect(g, spec, Tolerance{1e-3, 1e-3, 6});
  const IntegralResult b = gauss_expect(g, spec, Tolerance{1e-3, 1e-3, 6});
  EXPECT_EQ(a.value, b.value);
  EXPECT_NEAR(a.value, 5.0, 0.02);
  EXPECT_EQ(QuadratureSpec::for_dimension(6).scheme, Scheme::Qmc);
  EXPECT_EQ(QuadratureSpec::for_dimension(3).scheme, Scheme::GaussHermite);
}

TEST(GaussExpect, DimensionAndSpecErrors) {
  EXPECT_THROW(gauss_expect(to_field(x, 1), QuadratureSpec::gauss_hermite(2)), DimensionMismatch);
  EXPECT_THROW(gauss_expect(x, QuadratureSpec::gauss_hermite(1, 1)), ConfigError);
  EXPECT_THROW(gauss_expect(x, QuadratureSpec::gauss_hermite(5)), ConfigError);
  EXPECT_THROW(gauss_expect(x, QuadratureSpec::qmc(1, 100)), ConfigError);
  EXPECT_THROW(gauss_expect(to_field(x * y, 2), QuadratureSpec::piecewise()), Error);
}

// e^{c x^2} is M-integrable exactly when c < 1/2; the probe must agree on both sides.
TEST(Finiteness, GaussianGrowthThreshold) {
  const QuadratureSpec s1 = QuadratureSpec::gauss_hermite(1);
  for (double c : {0.1, 0.3, 0.45}) {
    auto r = try_gauss_expect(to_field(exp(c * x * x), 1), s1);
    ASSERT_TRUE(r.has_value()) << c;
    EXPECT_NEAR(r->value, 1.0 / std::sqrt(1.0 - 2.0 * c), 1e-3 / std::sqrt(1.0 - 2.0 * c)) << c;
  }
  for (double c : {0.5, 0.6, 1.0}) EXPECT_FALSE(try_gauss_expect(to_field(exp(c * x * x), 1), s1).has_value()) << c;
  const QuadratureSpec s2 = QuadratureSpec::gauss_hermite(2);
  EXPECT_TRUE(try_gauss_expect(to_field(exp(0.3 * (x * x + y * y)), 2), s2).has_value());
  EXPECT_FALSE(try_gauss_expect(to_field(exp(0.5 * (x * x + y * y)), 2), s2).has_value());
  // Integrable singularities and a non-integrable one.
  EXPECT_TRUE(try_gauss_expect(to_field(log(abs(x)), 1), s1).has_value());
  EXPECT_FALSE(try_gauss_expect(to_field(recip(abs(x)), 1), s1).has_value());
}

TEST(Lebesgue, BallIntegrals) {
  EXPECT_NEAR(lebesgue_integral_ball(Expr::constant(1.0), 2.0, 1).value, 4.0, 1e-12);
  EXPECT_NEAR(lebesgue_integral_ball(Expr::constant(1.0), 1.5, 2).value, std::numbers::pi * 2.25, 1e-10);
  EXPECT_NEAR(lebesgue_integral_ball(x * x + y * y, 1.0, 2).value, std::numbers::pi / 2.0, 1e-10);
  EXPECT_NEAR(lebesgue_integral_ball(Expr::constant(1.0), 1.0, 3).value, 4.0 * std::numbers::pi / 3.0, 1e-9);
}

TEST(Mollify, PreservesConstantsAndAffineFunctions) {
  const double mass1 = simpson([](double z) { return std::fabs(z) < 1 ? std::exp(-1.0 / (1 - z * z)) : 0.0; }, -1.0, 1.0);
  EXPECT_NEAR(bump_mass(1), mass1, 1e-9);
  const Field c = mollify(Expr::constant(2.0), 1, 0.3);
  EXPECT_NEAR(c({0.7}), 2.0, 1e-12);
  // The bump is even, so convolution fixes affine functions.
  const Field a = mollify(3.0 * x - 1.0, 1, 0.5);
  EXPECT_NEAR(a({0.4}), 0.2, 1e-12);
  const Field a2 = mollify(x - 2.0 * y, 2, 0.25);
  EXPECT_NEAR(a2({1.0, 1.0}), -1.0, 1e-10);
  // |x| smoothed at 0 is positive and below lambda.
  const double m0 = mollify(abs(x), 1, 0.2)({0.0});
  EXPECT_GT(m0, 0.0);
  EXPECT_LT(m0, 0.2);
}

TEST(DefaultOrder, EnvironmentOverrideIsBounded) {
  EXPECT_GE(default_gh_order(1), 2u);
  EXPECT_LE(default_gh_order(1), max_gh_order(1));
  EXPECT_GE(max_gh_order(1), max_gh_order(2));
  EXPECT_GE(max_gh_order(3), max_gh_order(4));
}

}  // namespace
