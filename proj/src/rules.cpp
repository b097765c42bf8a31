#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "gaussig/error.hpp"
#include "gaussig/quadrature.hpp"

namespace gaussig {

namespace {

// Orthonormal Hermite values p_{m-1}(x), p_m(x) for the standard normal weight,
// plus log of sum_{k<m} p_k(x)^2. Values are kept scaled by exp(-log_scale).
struct HermiteEval {
  double pm1, pm, log_sumsq;
};

HermiteEval hermite_orthonormal(std::size_t m, double x) {
  double prev = 0.0, cur = 1.0;  // p_{-1}, p_0
  double sumsq = 0.0;
  double log_scale = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sumsq += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    if (std::fabs(cur) > 1e100) {
      prev *= 1e-100;
      cur *= 1e-100;
      sumsq *= 1e-200;
      log_scale += 100.0 * std::numbers::ln10;
    }
  }
  return {prev, cur, std::log(sumsq) + 2.0 * log_scale};
}

Rule build_gauss_hermite(std::size_t m) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(m - 1));
  for (std::size_t k = 1; k < m; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NoConvergence("Gauss-Hermite eigenvalue solve failed", 0.0, 0.0);
  std::vector<double> x(solver.eigenvalues().data(), solver.eigenvalues().data() + m);

  const double sm = std::sqrt(static_cast<double>(m));
  for (double& xi : x) {
    for (int it = 0; it < 8; ++it) {
      const HermiteEval h = hermite_orthonormal(m, xi);
      const double step = h.pm / (sm * h.pm1);
      xi -= step;
      if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(xi))) break;
    }
  }
  std::sort(x.begin(), x.end());
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double a = 0.5 * (x[m - 1 - i] - x[i]);
    x[i] = -a;
    x[m - 1 - i] = a;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;

  Rule r;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = std::exp(-hermite_orthonormal(m, x[i]).log_sumsq);
    if (w < 1e-300) continue;
    r.nodes.push_back(x[i]);
    r.weights.push_back(w);
  }
  return r;
}

Rule build_gauss_legendre(std::size_t m) {
  Rule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(k) - 1.0) * z * p1 - (static_cast<double>(k) - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(m) * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::fabs(step) < 1e-16) break;
    }
    r.nodes[i] = -z;
    r.nodes[m - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) r.nodes[m / 2] = 0.0;
  return r;
}

template <class Build>
const Rule& cached(std::map<std::size_t, std::unique_ptr<Rule>>& cache, std::mutex& mu, std::size_t m, Build build) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return *it->second;
  auto rule = std::make_unique<Rule>(build(m));
  const Rule& ref = *rule;
  cache.emplace(m, std::move(rule));
  return ref;
}

}  // namespace

const Rule& gauss_hermite_rule(std::size_t m) {
  if (m < 2) throw ConfigError("Gauss-Hermite order must be at least 2");
  static std::map<std::size_t, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return cached(cache, mu, m, build_gauss_hermite);
}

const Rule& gauss_legendre_rule(std::size_t m) {
  if (m < 1) throw ConfigError("Gauss-Legendre order must be positive");
  static std::map<std::size_t, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return cached(cache, mu, m, build_gauss_legendre);
}

}  // namespace gaussig
