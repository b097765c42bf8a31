#include "gaussig/young.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gaussig/error.hpp"

namespace gaussig {

std::string young_name(YoungKind y) {
  switch (y) {
    case YoungKind::CoshMinusOne: return "cosh_minus_one";
    case YoungKind::CoshConj: return "cosh_conj";
    case YoungKind::ExpPhi: return "exp_phi";
    case YoungKind::LogPsi: return "log_psi";
  }
  return "?";
}

YoungKind young_from_name(const std::string& s) {
  for (YoungKind y : {YoungKind::CoshMinusOne, YoungKind::CoshConj, YoungKind::ExpPhi, YoungKind::LogPsi}) {
    if (young_name(y) == s) return y;
  }
  throw ConfigError("unknown Young function \"" + s + "\"");
}

YoungKind conjugate(YoungKind y) {
  switch (y) {
    case YoungKind::CoshMinusOne: return YoungKind::CoshConj;
    case YoungKind::CoshConj: return YoungKind::CoshMinusOne;
    case YoungKind::ExpPhi: return YoungKind::LogPsi;
    case YoungKind::LogPsi: return YoungKind::ExpPhi;
  }
  return y;
}

namespace {

// e^x - 1 - x for 0 <= x < 0.5 by its Taylor series.
double exp_phi_series(double x) {
  double term = x * x / 2.0, sum = 0.0;
  for (int k = 3; k < 40 && term > 1e-18 * sum; ++k) {
    sum += term;
    term *= x / k;
  }
  return sum + term;
}

// (1+y) log(1+y) - y = sum_{k>=2} (-1)^k y^k / (k (k-1)) for 0 <= y < 0.1.
double log_psi_series(double y) {
  double pw = y * y, sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    const double term = pw / (k * (k - 1.0));
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-18 * sum) break;
    pw *= y;
  }
  return sum;
}

// log sinh(u) for u > 0.
double log_sinh(double u) {
  if (u > 1.0) return u + std::log1p(-std::exp(-2.0 * u)) - std::numbers::ln2;
  return std::log(std::sinh(u));
}

}  // namespace

double young_eval(YoungKind y, double t) {
  t = std::fabs(t);
  if (std::isnan(t)) return t;
  switch (y) {
    case YoungKind::CoshMinusOne: {
      if (t > 710.0) return std::numeric_limits<double>::infinity();
      const double s = std::sinh(0.5 * t);
      return 2.0 * s * s;
    }
    case YoungKind::CoshConj:
      if (std::isinf(t)) return t;
      return t * std::asinh(t) - t * t / (std::sqrt(1.0 + t * t) + 1.0);
    case YoungKind::ExpPhi:
      if (t < 0.5) return exp_phi_series(t);
      return std::expm1(t) - t;
    case YoungKind::LogPsi:
      if (t < 0.1) return log_psi_series(t);
      return (1.0 + t) * std::log1p(t) - t;
  }
  return 0.0;
}

double young_log(YoungKind y, double t) {
  t = std::fabs(t);
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  switch (y) {
    case YoungKind::CoshMinusOne:
      // cosh t - 1 = 2 sinh^2(t/2)
      return std::numbers::ln2 + 2.0 * log_sinh(0.5 * t);
    case YoungKind::ExpPhi:
      if (t > 30.0) return t + std::log1p(-(1.0 + t) * std::exp(-t));
      return std::log(young_eval(y, t));
    default:
      return std::log(young_eval(y, t));
  }
}

double young_derivative(YoungKind y, double t) {
  const double s = t < 0 ? -1.0 : 1.0;
  const double a = std::fabs(t);
  switch (y) {
    case YoungKind::CoshMinusOne: return s * std::sinh(a);
    case YoungKind::CoshConj: return s * std::asinh(a);
    case YoungKind::ExpPhi: return s * std::expm1(a);
    case YoungKind::LogPsi: return s * std::log1p(a);
  }
  return 0.0;
}

}  // namespace gaussig
