#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gaussig/error.hpp"
#include "gaussig/manifold.hpp"

using namespace gaussig;

namespace {

const Expr x = Expr::coordinate(0);
const Expr y = Expr::coordinate(1);
const QuadratureSpec s1 = QuadratureSpec::gauss_hermite(1);
const QuadratureSpec s2 = QuadratureSpec::gauss_hermite(2);

double Phi(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }
double phi(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

// log E_M[e^{a x + c (x^2 - 1)}] for c < 1/2.
double gaussian_log_mgf(double a, double c) { return -c - 0.5 * std::log(1.0 - 2.0 * c) + a * a / (2.0 * (1.0 - 2.0 * c)); }

TEST(Cumulant, LinearAndQuadraticStatistics) {
  for (double theta : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    EXPECT_NEAR(cumulant(theta * x, s1).value, 0.5 * theta * theta, 1e-9) << theta;
  }
  for (double c : {-1.0, 0.1, 0.3, 0.45}) {
    const double expected = gaussian_log_mgf(0.0, c);
    EXPECT_NEAR(cumulant(c * hermite(2), s1).value, expected, 1e-6 * std::max(1.0, std::fabs(expected))) << c;
  }
  EXPECT_NEAR(cumulant(0.3 * x + 0.2 * hermite(2), s1).value, gaussian_log_mgf(0.3, 0.2), 1e-8);
  // Independent coordinates add.
  EXPECT_NEAR(cumulant(0.5 * x - 0.8 * y, s2).value, 0.5 * (0.25 + 0.64), 1e-9);
  EXPECT_THROW(partition(0.6 * hermite(2), s1), NoConvergence);
}

// Property: K is convex along lines, checked by midpoint convexity.
TEST(Cumulant, ConvexAlongLines) {
  const Expr u = tanh(x) + 0.3 * x, v = 0.2 * hermite(2) - 0.1 * x;
  for (double s : {-1.0, 0.0, 0.5}) {
    const double a = cumulant(s * u + (1 - s) * v, s1).value;
    const double b = cumulant((s + 0.5) * u + (0.5 - s) * v, s1).value;
    const double m = cumulant((s + 0.25) * u + (0.75 - s) * v, s1).value;
    EXPECT_LE(m, 0.5 * (a + b) + 1e-10) << s;
  }
}

TEST(Chart, InvertsThePatch) {
  for (const Expr& u : {0.5 * x, 0.2 * hermite(2), tanh(x), 0.3 * abs(x)}) {
    const SufficientStatistic U = make_statistic(u, 1, s1);
    const GaussDensity p = patch(U, s1);
    const SufficientStatistic back = chart(p, s1);
    for (double t = -4.0; t <= 4.0; t += 0.25) {
      EXPECT_NEAR(back.centered()({t}), U.centered()({t}), 1e-8) << u.to_string() << " at " << t;
    }
  }
  EXPECT_NEAR(make_statistic(hermite(2) + 3.0, 1, s1).centered_value, 3.0, 1e-12);
}

// Tilts f = e^{a x - a^2/2}, g = e^{b x - b^2/2}: s_f(g) = (b - a)(x - a).
TEST(Chart, AtAnotherBaseDensity) {
  const double a = 0.4, b = -0.9;
  const GaussDensity f = patch(make_statistic(a * x, 1, s1), s1);
  const GaussDensity g = patch(make_statistic(b * x, 1, s1), s1);
  const SufficientStatistic s = chart_at(f, g, s1);
  for (double t : {-2.0, 0.0, 1.5}) EXPECT_NEAR(s.centered()({t}), (b - a) * (t - a), 1e-9) << t;
}

TEST(Patch, DerivativeRatioAndNormalization) {
  EXPECT_TRUE(patch_derivative_check(0.5 * x, hermite(2), 1, s1).pass);
  EXPECT_TRUE(patch_derivative_check(0.2 * hermite(2), x, 1, s1).pass);
  EXPECT_TRUE(patch_derivative_check(0.3 * x - 0.2 * y, x * y, 2, s2).pass);
  const GaussDensity p = patch(make_statistic(0.3 * x + 0.1 * hermite(2), 1, s1), s1);
  EXPECT_NEAR(p.K, gaussian_log_mgf(0.3, 0.1), 1e-9);
}

// e^{+-alpha c He_2} are both integrable exactly when alpha c < 1/2.
TEST(Domain, QuadraticStatisticThreshold) {
  for (double c : {0.1, 0.22, 0.3, 0.45, 0.6}) {
    for (const AlphaVerdict& v : domain_alpha_scan(c * hermite(2), 1, s1)) {
      EXPECT_EQ(v.converged, v.alpha * c < 0.5) << "c=" << c << " alpha=" << v.alpha;
    }
  }
  EXPECT_TRUE(domain_membership(0.3 * hermite(2), 1, s1).pass);
  EXPECT_FALSE(domain_membership(0.49 * hermite(2), 1, s1).pass);
  EXPECT_TRUE(domain_membership(2.0 * x + tanh(y), 2, s2).pass);
}

TEST(Domain, PartitionBound) {
  for (const Expr& u : {0.5 * x, 0.2 * hermite(2), tanh(3.0 * x), 0.4 * abs(x) - 0.3}) {
    const CheckReport r = partition_bound_check(u, 1, s1);
    EXPECT_TRUE(r.pass) << u.to_string() << " " << r.note;
  }
}

TEST(Moments, TiltedAndSquaredDensities) {
  EXPECT_TRUE(moment_membership_search(to_field(exp(0.5 * x - 0.125), 1), s1).pass);
  EXPECT_TRUE(moment_membership_search(to_field(x * x, 1), s1).pass);
}

// Under the tilt N(theta, 1): Var x = 1 and Cov(x, x^2) = 2 theta.
TEST(Bundle, InnerProductIsTheCovariance) {
  const double theta = 0.6;
  const GaussDensity p = patch(make_statistic(theta * x, 1, s1), s1);
  EXPECT_NEAR(bundle_inner(p, x, x, s1), 1.0, 1e-9);
  EXPECT_NEAR(bundle_inner(p, x, x * x, s1), 2.0 * theta, 1e-9);
  EXPECT_NEAR(bundle_inner(p, Expr::constant(1.0), x, s1), 0.0, 1e-12);
}

TEST(Family, LogPartitionOfGaussianStatistics) {
  const std::vector<SufficientStatistic> stats{make_statistic(x, 1, s1), make_statistic(hermite(2), 1, s1)};
  for (const auto& theta : std::vector<std::vector<double>>{{0.3, 0.1}, {-1.0, -0.5}, {0.0, 0.2}}) {
    const ExpFamily fam = exp_family(stats, theta, s1);
    EXPECT_NEAR(fam.psi, gaussian_log_mgf(theta[0], theta[1]), 1e-8);
    EXPECT_NEAR(gauss_expect(fam.density(), s1).value, 1.0, 1e-9);
  }
}

// Two unit-variance tilts at a and b: E_M|p - q| = 2 (2 Phi(|a - b| / 2) - 1).
TEST(Variation, DistanceBetweenTilts) {
  for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-0.5, 0.7}, std::pair{0.3, 0.3}}) {
    const Expr p = exp(a * x - 0.5 * a * a), q = exp(b * x - 0.5 * b * b);
    EXPECT_NEAR(variation_distance(p, q, 1, s1), 2.0 * (2.0 * Phi(std::fabs(a - b) / 2.0) - 1.0), 1e-9);
  }
}

// chi = 2x + 1 pushes M to N(1, 4).
TEST(Diffeo, AffineImage) {
  const Field q = diffeo_image_density(2.0 * x + 1.0);
  for (double t : {-2.0, 0.0, 1.0, 3.5}) EXPECT_NEAR(q({t}), 0.5 * phi((t - 1.0) / 2.0) / phi(t), 1e-10 * q({t})) << t;
  EXPECT_TRUE(diffeo_image_density_1d(2.0 * x + 1.0).pass);
  EXPECT_TRUE(diffeo_image_density_1d(x + 0.3 * tanh(x)).pass);
  EXPECT_THROW(diffeo_image_density(pow(x, 3)), NotMonotone);
}

}  // namespace
