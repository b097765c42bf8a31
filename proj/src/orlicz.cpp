#include "gaussig/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaussig/error.hpp"

namespace gaussig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Probe {
  double value;
  double error;
  bool converged;
};

Field young_of(const Field& f, YoungKind y, double rho, const Field* weight) {
  Field g = map(f, [y, rho](double v) { return young_eval(y, v / rho); });
  if (weight != nullptr) g = g * *weight;
  return g;
}

// E_M[w Y(f / rho)] without throwing on divergence.
Probe probe(const Field& f, YoungKind y, const QuadratureSpec& spec, double rho, const Field* weight) {
  try {
    const IntegralResult r = gauss_expect(young_of(f, y, rho, weight), spec, Tolerance::precise());
    return {r.value, r.error_estimate, true};
  } catch (const NonFinite&) {
    return {kInf, kInf, false};
  } catch (const NoConvergence& e) {
    // Slowly decaying one-dimensional integrands stall Gauss-Hermite; the split
    // tanh-sinh rule handles them.
    if (spec.dimension == 1 && spec.scheme == Scheme::GaussHermite && std::isfinite(e.last_value())) {
      QuadratureSpec line = spec;
      line.scheme = Scheme::Piecewise1d;
      try {
        const IntegralResult r = gauss_expect(young_of(f, y, rho, weight), line, Tolerance::precise());
        return {r.value, r.error_estimate, true};
      } catch (const NoConvergence& e2) {
        if (std::isfinite(e2.last_error()) && e2.last_error() < e.last_error()) {
          return {e2.last_value(), e2.last_error(), false};
        }
      } catch (const NonFinite&) {
      }
    }
    return {e.last_value(), e.last_error(), false};
  }
}

// Decides E[Y(f/rho)] <= 1. An unconverged value still decides when it has
// settled (the error then travels with the result) or when its error is small
// against the distance to 1; otherwise the modular counts as large.
bool within_unit_ball(const Probe& p) {
  if (p.converged) return p.value <= 1.0;
  if (!std::isfinite(p.value) || !std::isfinite(p.error)) return false;
  if (p.error <= 1e-3 * (1.0 + std::fabs(p.value))) return p.value <= 1.0;
  if (p.error < 0.1 * std::fabs(p.value - 1.0)) return p.value <= 1.0;
  return false;
}

// log(lhs / rhs) turned into a ratio; 0/0 counts as equality.
double log_ratio(double log_lhs, double log_rhs) {
  if (log_lhs == -kInf && log_rhs == -kInf) return 1.0;
  return std::exp(log_lhs - log_rhs);
}

}  // namespace

IntegralResult modular(const Field& f, YoungKind y, const QuadratureSpec& spec, const Tolerance& tol) {
  try {
    return gauss_expect(young_of(f, y, 1.0, nullptr), spec, tol);
  } catch (const NonFinite& e) {
    throw NoConvergence(std::string("modular is not finite: ") + e.what(), kInf, kInf);
  }
}

IntegralResult modular(const Expr& f, YoungKind y, const QuadratureSpec& spec, const Tolerance& tol) {
  return modular(to_field(f, spec.dimension), y, spec, tol);
}

LuxemburgNorm luxemburg_norm(const Field& f_in, YoungKind y, const QuadratureSpec& spec, const Field* weight) {
  const Field f = memoize(f_in);
  LuxemburgNorm out;
  out.young = y;

  const Probe at_one = probe(f, y, spec, 1.0, weight);
  if (at_one.converged && at_one.value == 0.0) return out;

  double lo = 1.0, hi = 1.0;
  if (within_unit_ball(at_one)) {
    lo = 0.5;
    int steps = 0;
    while (within_unit_ball(probe(f, y, spec, lo, weight))) {
      if (++steps > 60) throw NoConvergence("Luxemburg norm below the bracket range", 0.0, 0.0);
      hi = lo;
      lo *= 0.5;
    }
  } else {
    hi = 2.0;
    int steps = 0;
    while (!within_unit_ball(probe(f, y, spec, hi, weight))) {
      if (++steps > 60) throw NoConvergence("modular is infinite at every scaling in the bracket", kInf, kInf);
      lo = hi;
      hi *= 2.0;
    }
  }
  while (hi / lo - 1.0 > 1e-13) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (within_unit_ball(probe(f, y, spec, mid, weight))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const Probe final_probe = probe(f, y, spec, hi, weight);
  out.value = hi;
  out.modular_at_value = final_probe.value;
  out.error_estimate = final_probe.error;
  return out;
}

LuxemburgNorm luxemburg_norm(const Expr& f, YoungKind y, const QuadratureSpec& spec) {
  return luxemburg_norm(to_field(f, spec.dimension), y, spec);
}

double orlicz_dual_norm(const Field& f_in, YoungKind y, const QuadratureSpec& spec, const Field* weight) {
  const Field f = memoize(f_in);
  const LuxemburgNorm lux = luxemburg_norm(f, y, spec, weight);
  if (lux.value == 0.0) return 0.0;

  // k = c / lux; the Amemiya objective is unimodal in k.
  auto objective = [&](double log_c) {
    const double k = std::exp(log_c) / lux.value;
    const Probe p = probe(f, y, spec, 1.0 / k, weight);
    if (!std::isfinite(p.value)) return kInf;
    if (!p.converged && !(p.error <= 1e-6 * (1.0 + std::fabs(p.value)))) return kInf;
    return (1.0 + p.value) / k;
  };

  const double step = 0.5 * std::log(2.0);
  double best = 2.0 * lux.value;  // c = 1 gives exactly 2 * lux by saturation
  std::vector<double> xs, vs;
  for (int j = -2; j <= 40; ++j) {
    xs.push_back(j * step);
    vs.push_back(objective(xs.back()));
    if (vs.size() >= 3 && vs.back() > vs[vs.size() - 2]) break;
  }
  const std::size_t imin = std::min_element(vs.begin(), vs.end()) - vs.begin();
  double a = xs[imin > 0 ? imin - 1 : 0];
  double b = xs[std::min(imin + 1, xs.size() - 1)];
  best = std::min(best, vs[imin]);

  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = objective(c), fd = objective(d);
  // The objective is flat at its minimum: a 1e-7 bracket in log k pins the value to ~1e-14.
  while (b - a > 1e-7) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = objective(d);
    }
  }
  return std::min({best, fc, fd});
}

double orlicz_dual_norm(const Expr& f, YoungKind y, const QuadratureSpec& spec) {
  return orlicz_dual_norm(to_field(f, spec.dimension), y, spec);
}

double lp_norm(const Field& f, double a, const QuadratureSpec& spec) {
  if (!(a >= 1.0)) throw DomainError("L^a norm needs a >= 1");
  const Field g = map(f, [a](double v) { return std::pow(std::fabs(v), a); });
  try {
    return std::pow(gauss_expect(g, spec).value, 1.0 / a);
  } catch (const NonFinite& e) {
    throw NoConvergence(std::string("L^a moment is not finite: ") + e.what(), kInf, kInf);
  }
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {std::pow(10.0, lo)};
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  return out;
}

CheckReport delta2_check(double a, const std::vector<double>& ygrid, double tolerance) {
  if (ygrid.empty()) throw DomainError("delta2 grid is empty");
  const double C = std::max(std::fabs(a), a * a);
  double worst = -kInf, at = 0.0;
  for (double y : ygrid) {
    const double lhs = young_eval(YoungKind::CoshConj, a * y);
    const double rhs = C * young_eval(YoungKind::CoshConj, y);
    const double ratio = (lhs == 0.0 && rhs == 0.0) ? 1.0 : lhs / rhs;
    if (ratio > worst) {
      worst = ratio;
      at = y;
    }
  }
  std::ostringstream note;
  note << "worst ratio Y*(a y) / (C(a) Y*(y)) at y = " << format_number(at) << ", C(a) = " << format_number(C);
  return make_le("delta2", worst, 1.0, tolerance, note.str());
}

CheckReport conjugacy_sandwich_check(const std::vector<double>& grid, double tolerance) {
  const double ln2 = std::log(2.0);
  struct Side {
    const char* name;
    double worst = -kInf;
    double at = 0.0;
  };
  Side sides[4] = {{"psi<=conj"}, {"conj<=psi(2y)/2"}, {"phi/2<=cosh-1"}, {"cosh-1<=phi"}};
  for (double t : grid) {
    if (t < 0.0) throw DomainError("sandwich grid must be nonnegative");
    const double lpsi = young_log(YoungKind::LogPsi, t);
    const double lconj = young_log(YoungKind::CoshConj, t);
    const double lpsi2 = young_log(YoungKind::LogPsi, 2.0 * t) - ln2;
    const double lphi = young_log(YoungKind::ExpPhi, t);
    const double lcosh = young_log(YoungKind::CoshMinusOne, t);
    const double ratios[4] = {log_ratio(lpsi, lconj), log_ratio(lconj, lpsi2), log_ratio(lphi - ln2, lcosh),
                              log_ratio(lcosh, lphi)};
    for (int i = 0; i < 4; ++i) {
      if (ratios[i] > sides[i].worst) {
        sides[i].worst = ratios[i];
        sides[i].at = t;
      }
    }
  }
  std::vector<CheckReport> parts;
  for (const Side& s : sides) {
    parts.push_back(make_le(std::string("sandwich.") + s.name, s.worst, 1.0, tolerance,
                            "worst ratio at t = " + format_number(s.at)));
  }
  return combine("conjugacy_sandwich", parts);
}

CheckReport fenchel_young_check(const std::vector<double>& xs, const std::vector<double>& ys, double tolerance) {
  double worst = -kInf;
  for (double x : xs) {
    for (double y : ys) {
      const double rhs = young_eval(YoungKind::CoshMinusOne, x) + young_eval(YoungKind::CoshConj, y);
      const double lhs = std::fabs(x * y);
      const double ratio = (lhs == 0.0 && rhs == 0.0) ? 1.0 : lhs / rhs;
      worst = std::max(worst, ratio);
    }
  }
  std::vector<CheckReport> parts;
  parts.push_back(make_le("fenchel_young.inequality", worst, 1.0, tolerance, "worst ratio x y / (Y(x) + Y*(y))"));
  double worst_gap = 0.0, at = 0.0;
  for (double x : xs) {
    const double y = std::sinh(x);
    if (!std::isfinite(y)) continue;
    const double rhs = young_eval(YoungKind::CoshMinusOne, x) + young_eval(YoungKind::CoshConj, y);
    const double gap = std::fabs(rhs - x * y) / std::max(1.0, rhs);
    if (gap >= worst_gap) {
      worst_gap = gap;
      at = x;
    }
  }
  parts.push_back(make_le("fenchel_young.equality", worst_gap, 0.0, tolerance,
                          "relative gap at y = sinh(x), worst x = " + format_number(at)));
  return combine("fenchel_young", parts);
}

CheckReport lebesgue_inclusion_check(const Expr& f, std::size_t dim, double a, double R,
                                     const QuadratureSpec& spec) {
  if (!(a > 1.0)) throw DomainError("inclusion exponent must exceed 1");
  if (!(R > 0.0)) throw DomainError("restriction radius must be positive");
  const Field field = to_field(f, dim);

  auto lux = [&](YoungKind y) {
    try {
      return luxemburg_norm(field, y, spec).value;
    } catch (const NoConvergence&) {
      return kInf;
    }
  };
  auto moment = [&](double p) {
    const Field g = map(field, [p](double v) { return std::pow(std::fabs(v), p); });
    const auto r = try_gauss_expect(g, spec, Tolerance::finiteness());
    return r ? std::pow(r->value, 1.0 / p) : kInf;
  };

  const double norms[4] = {lux(YoungKind::CoshMinusOne), moment(a), lux(YoungKind::CoshConj), moment(1.0)};
  const char* names[4] = {"exp", "L^a", "LlogL", "L1"};

  double restricted = kInf;
  try {
    const Field g = map(field, [a](double v) { return std::pow(std::fabs(v), a); });
    restricted = std::pow(lebesgue_integral_ball(g, R).value, 1.0 / a);
  } catch (const NoConvergence&) {
  } catch (const NonFinite&) {
  }

  bool chain_ok = true;
  bool seen_finite = false;
  for (double v : norms) {
    const bool finite = std::isfinite(v);
    if (seen_finite && !finite) chain_ok = false;
    seen_finite = seen_finite || finite;
  }
  const bool ok = chain_ok && std::isfinite(restricted);

  std::ostringstream note;
  note << "a = " << format_number(a) << ", R = " << format_number(R) << ";";
  for (int i = 0; i < 4; ++i) note << ' ' << names[i] << '=' << format_number(norms[i]);
  note << "; L^a(ball)=" << format_number(restricted);
  return make_verdict("lebesgue_inclusion", ok, note.str());
}

}  // namespace gaussig
