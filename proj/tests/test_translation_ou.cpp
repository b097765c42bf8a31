#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gaussig/error.hpp"
#include "gaussig/orlicz.hpp"
#include "gaussig/sampling.hpp"
#include "gaussig/translation_ou.hpp"

using namespace gaussig;

namespace {

const Expr x = Expr::coordinate(0);
const Expr y = Expr::coordinate(1);
const QuadratureSpec s1 = QuadratureSpec::gauss_hermite(1);
const QuadratureSpec s2 = QuadratureSpec::gauss_hermite(2);

double Phi(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }
double phi(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

const std::vector<std::vector<double>> kProbe1{{-2.0}, {-0.5}, {0.0}, {0.7}, {2.5}};

TEST(Translation, AdjointHasTheClosedForm) {
  const std::vector<double> h{0.4};
  const Expr g = tanh(x) + x * x;
  const Expr a = adjoint_translate(g, h);
  for (double t : {-1.0, 0.0, 2.0}) EXPECT_NEAR(a({t}), std::exp(-0.4 * t - 0.08) * g({t + 0.4}), 1e-14);
}

// Property: duality holds for random polynomials and shifts.
TEST(Translation, DualityOnRandomPairs) {
  Rng rng(21);
  for (int i = 0; i < 8; ++i) {
    const Expr f = random_polynomial(rng, 1, 3, 1.0), g = i % 2 ? tanh(x) : random_polynomial(rng, 1, 2, 1.0);
    const std::vector<double> h{uniform(rng, -1.5, 1.5)};
    const CheckReport r = adjoint_duality_check(f, g, h, 1, s1);
    EXPECT_TRUE(r.pass) << f.to_string() << " / " << g.to_string() << " h=" << h[0] << " " << r.note;
  }
  const std::vector<double> h2{0.3, -0.6};
  EXPECT_TRUE(adjoint_duality_check(x * y, exp(0.2 * y), h2, 2, s2).pass);
}

TEST(Translation, NormBoundInsideTheRadius) {
  const double r = std::sqrt(std::log(2.0));
  for (double h : {-r, 0.3, r}) {
    const std::vector<double> hv{h};
    for (const Expr& f : {x, abs(x), tanh(x), 0.3 * hermite(2)}) {
      const CheckReport c = translation_norm_bound_check(f, hv, 1, s1);
      EXPECT_TRUE(c.pass) << f.to_string() << " h=" << h << " " << c.note;
    }
  }
  const std::vector<double> far{1.0};
  EXPECT_THROW(translation_norm_bound_check(x, far, 1, s1), DomainError);
}

TEST(ExpClass, LinearGrowthInQuadraticGrowthOut) {
  const std::vector<double> radii{2.0, 4.0, 6.0, 8.0};
  EXPECT_TRUE(exp_class_membership(abs(x), 1, radii, s1).pass);
  EXPECT_TRUE(exp_class_membership(tanh(x), 1, radii, s1).pass);
  EXPECT_FALSE(exp_class_membership(x * x, 1, radii, s1).pass);
}

TEST(Mollifier, ConvergesInTheExponentialNorm) {
  const std::vector<double> lambdas{0.4, 0.2, 0.1};
  EXPECT_TRUE(mollifier_convergence_check(abs(x), 1, lambdas, s1).pass);
  EXPECT_TRUE(mollifier_convergence_check(tanh(x), 1, lambdas, s1).pass);
}

// P_t e^{a x} = exp(a e^{-t} x + a^2 (1 - e^{-2t}) / 2).
TEST(OU, MehlerOnExponentials) {
  const double a = 0.8;
  for (double t : {0.05, 0.5, 2.0}) {
    const Field p = ou_apply(exp(a * x), 1, OUSpec{t});
    for (double u : {-3.0, 0.0, 1.7}) {
      const double expected = std::exp(a * std::exp(-t) * u + 0.5 * a * a * (1.0 - std::exp(-2.0 * t)));
      EXPECT_NEAR(p({u}), expected, 1e-11 * expected) << t << " " << u;
    }
  }
}

// E|m + s Y| = m (1 - 2 Phi(-m / s)) + 2 s phi(m / s).
TEST(OU, MehlerOnTheKink) {
  for (double t : {0.1, 1.0}) {
    const Field p = ou_apply(abs(x), 1, OUSpec{t});
    const double s = std::sqrt(1.0 - std::exp(-2.0 * t));
    for (double u : {-2.0, -0.1, 0.0, 0.4, 3.0}) {
      const double m = std::exp(-t) * u;
      EXPECT_NEAR(p({u}), m * (1.0 - 2.0 * Phi(-m / s)) + 2.0 * s * phi(m / s), 1e-9) << t << " " << u;
    }
  }
}

TEST(OU, HermiteEigenfunctionsSemigroupAndMean) {
  for (unsigned k = 0; k <= 4; ++k) {
    for (double t : {0.1, 1.0}) EXPECT_TRUE(ou_hermite_check(k, t).pass) << k << " " << t;
  }
  for (const Expr& f : {tanh(x), abs(x), 0.5 * x, hermite(3)}) {
    EXPECT_TRUE(ou_semigroup_check(f, 1, 0.3, 0.7, kProbe1).pass) << f.to_string();
    EXPECT_TRUE(ou_mean_check(f, 1, 0.5, s1).pass) << f.to_string();
  }
  EXPECT_TRUE(ou_semigroup_check(tanh(x) * y, 2, 0.2, 0.4, {{0.5, -1.0}, {1.5, 0.3}}).pass);
}

TEST(OU, ContractionForBothYoungFunctions) {
  for (YoungKind yk : {YoungKind::CoshMinusOne, YoungKind::CoshConj}) {
    for (const Expr& f : {tanh(x), abs(x), 0.5 * x, 0.2 * hermite(2)}) {
      const CheckReport r = ou_contraction_check(f, 1, yk, 0.5, s1);
      EXPECT_TRUE(r.pass) << young_name(yk) << " " << f.to_string() << " " << r.note;
    }
  }
}

// kappa_1 = 2 phi(0) + 2 (1 - Phi(1)); kappa_2 = 2 e^{-1/2} + sqrt(2 pi) (Phi(1) - 1/2).
TEST(Kappa, ClosedFormsAndQuadrature) {
  const double k1 = 2.0 * phi(0.0) + 2.0 * (1.0 - Phi(1.0));
  const double k2 = 2.0 * std::exp(-0.5) + std::sqrt(2.0 * std::numbers::pi) * (Phi(1.0) - 0.5);
  EXPECT_NEAR(kappa(1), k1, 1e-12);
  EXPECT_NEAR(kappa(1), 1.11519506867, 1e-10);
  EXPECT_NEAR(kappa(2), k2, 1e-12);
  EXPECT_NEAR(kappa_quadrature(1, s1).value, k1, 1e-8);
  // The kink on the unit circle slows the tensor rule; the reported error must cover the gap.
  const IntegralResult q2 = kappa_quadrature(2, s2);
  EXPECT_LE(std::fabs(q2.value - k2), q2.error_estimate);
  EXPECT_LE(q2.error_estimate, 1e-3);
  // Monotone in n, as E max(|y|, |y|^2) grows with the chi variable.
  for (std::size_t n = 1; n < 6; ++n) EXPECT_LT(kappa(n), kappa(n + 1));
}

TEST(Kappa, LambdaSolvesTheDefiningEquation) {
  EXPECT_NEAR(lambda_solve(1), 0.570859565519, 1e-11);
  for (std::size_t n : {1u, 2u, 5u}) {
    const double l = lambda_solve(n), a = l * std::numbers::pi / 2.0;
    EXPECT_NEAR(std::max(a, a * a) * kappa(n), 1.0, 1e-10) << n;
  }
  // Both branches of max(a, a^2): a^2 = 2 for kappa = 1/2, a = 1/4 for kappa = 4.
  EXPECT_NEAR(lambda_from_kappa(0.5), 2.0 * std::sqrt(2.0) / std::numbers::pi, 1e-10);
  EXPECT_NEAR(lambda_from_kappa(4.0), 0.5 / std::numbers::pi, 1e-10);
}

TEST(Poincare, MixtureDispersionAndCovariance) {
  EXPECT_NEAR(dispersion_constant(), std::numbers::pi / (2.0 * std::sqrt(2.0 * std::log(2.0))), 1e-15);
  EXPECT_NEAR(probe_lipschitz_1d(tanh(2.0 * x)), 2.0, 1e-6);
  for (const Expr& f : {tanh(x), 0.5 * x + 1.0, atan(2.0 * x), hermite(2)}) {
    const CheckReport r = poincare_mixture_check(f, 1, s1);
    EXPECT_TRUE(r.pass) << f.to_string() << " " << r.note;
  }
  EXPECT_TRUE(poincare_mixture_check(tanh(x) + 0.3 * y, 2, s2).pass);
  EXPECT_TRUE(dispersion_bound_check(tanh(x), 1, 1.0, s1).pass);
  EXPECT_TRUE(dispersion_bound_check(0.7 * x, 1, 0.7, s1).pass);
  for (VectorNormPair pr : {VectorNormPair::L1Linf, VectorNormPair::L2L2}) {
    EXPECT_TRUE(covariance_bound_check(tanh(x), x, 1, pr, s1).pass);
    EXPECT_TRUE(covariance_bound_check(x + y, tanh(x - y), 2, pr, s2).pass);
  }
}

// The Mehler representation of f - E f, at probe points.
TEST(Poincare, OuEquality) {
  EXPECT_TRUE(ou_equality_check(tanh(x), 1, kProbe1, s1).pass);
  EXPECT_TRUE(ou_equality_check(hermite(3), 1, kProbe1, s1).pass);
  EXPECT_TRUE(ou_equality_check(x * y + tanh(y), 2, {{0.3, -0.2}, {1.0, 1.0}}, s2).pass);
}

TEST(TranslatedDensity, MatchesTheShiftedMeasure) {
  const std::vector<double> h{0.3};
  for (const Expr& u : {0.5 * x, tanh(x), 0.2 * hermite(2)}) {
    const CheckReport r = translated_density_check(make_statistic(u, 1, s1), h, s1);
    EXPECT_TRUE(r.pass) << u.to_string() << " " << r.note;
  }
}

// Gaussian mu with variance v: tau_mu e^{a x} = e^{a x + a^2 v / 2} and the
// exponential moment is 1 / sqrt(1 - v).
TEST(MuTranslate, GaussianKernel) {
  const double a = 0.6, v = 0.3;
  const Field g = mu_translate(exp(a * x), 1, MuSpec::gaussian(v));
  for (double t : {-1.0, 0.5}) EXPECT_NEAR(g({t}), std::exp(a * t + 0.5 * a * a * v), 1e-11);
  EXPECT_NEAR(mu_exponential_moment(MuSpec::gaussian(v), 1), 1.0 / std::sqrt(1.0 - v), 1e-10);
  EXPECT_NEAR(mu_exponential_moment(MuSpec::gaussian(v), 2), 1.0 / (1.0 - v), 1e-10);
  EXPECT_TRUE(mu_translate_norm_check(abs(x), 1, MuSpec::gaussian(0.4), s1).pass);
  EXPECT_TRUE(mu_translate_norm_check(tanh(x), 1, MuSpec::mollifier(0.5), s1).pass);
  // Mollifier is even and fixes affine functions.
  EXPECT_NEAR(mu_translate(2.0 * x - 1.0, 1, MuSpec::mollifier(0.5))({0.25}), -0.5, 1e-10);
}

}  // namespace
