#include "gaussig/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "gaussig/error.hpp"
#include "gaussig/young.hpp"

namespace gaussig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double v) {
  if (v < 0.0) throw DomainError("density takes a negative value");
  return v > 0.0 ? v * std::log(v) : 0.0;
}

// Converged value, or the finiteness surrogate when full precision is out of reach.
std::optional<IntegralResult> finite_expect(const Field& f, const QuadratureSpec& spec) {
  auto r = try_gauss_expect(f, spec, Tolerance::precise());
  if (r || f.dim() != 1 || spec.scheme == Scheme::Piecewise1d) return r;
  return try_gauss_expect(f, QuadratureSpec::piecewise(), Tolerance::precise());
}

}  // namespace

double density_normalizer(const Field& p, const QuadratureSpec& spec) {
  try {
    return gauss_expect(p, spec).value;
  } catch (const NoConvergence& e) {
    if (std::isfinite(e.last_value()) && e.last_error() <= 1e-2 * std::fabs(e.last_value())) return e.last_value();
  } catch (const NonFinite&) {
  }
  if (p.dim() == 1 && spec.scheme != Scheme::Piecewise1d) {
    try {
      return gauss_expect(p, QuadratureSpec::piecewise()).value;
    } catch (const NoConvergence& e) {
      if (std::isfinite(e.last_value()) && e.last_error() <= 1e-2 * std::fabs(e.last_value())) {
        return e.last_value();
      }
    } catch (const NonFinite&) {
    }
  }
  throw NotADensity("E_M[p] cannot be computed");
}

EntropyReport entropy(const Field& p_in, const QuadratureSpec& spec) {
  EntropyReport out;
  out.normalizer = density_normalizer(p_in, spec);
  if (!(std::fabs(out.normalizer - 1.0) <= 0.01)) {
    throw NotADensity("E_M[p] = " + format_number(out.normalizer) + " is not within 1% of 1");
  }
  const Field p = memoize((1.0 / out.normalizer) * p_in);

  // The finiteness probe reads a throwing integrand as divergence, so a
  // negative sample is flagged and raised once the probe returns.
  auto negative = std::make_shared<bool>(false);
  auto guarded = [negative](auto g) {
    return [negative, g](double v) {
      if (v < 0.0) {
        *negative = true;
        return std::numeric_limits<double>::quiet_NaN();
      }
      return g(v);
    };
  };
  auto probe = [&](auto g) {
    auto r = finite_expect(map(p, guarded(g)), spec);
    if (*negative) throw DomainError("density takes a negative value");
    return r;
  };
  const auto h = probe(xlogx);
  const auto lp = probe([](double v) { return std::max(0.0, xlogx(v)); });
  const auto mm = probe([](double v) { return young_eval(YoungKind::CoshConj, v); });

  out.entropy_finite = h.has_value();
  out.entropy = h ? -h->value : -kInf;
  out.logplus_integral = lp ? lp->value : kInf;
  out.mixture_finite = mm.has_value();
  out.mixture_modular = mm ? mm->value : kInf;
  for (const auto* r : {&h, &lp, &mm}) {
    if (*r) out.error_estimate = std::max(out.error_estimate, (*r)->error_estimate);
  }
  return out;
}

EntropyReport entropy(const Expr& p, const QuadratureSpec& spec) { return entropy(to_field(p, spec.dimension), spec); }

CheckReport entropy_membership_check(const Field& p, const QuadratureSpec& spec) {
  const EntropyReport r = entropy(p, spec);
  std::ostringstream note;
  note << "H=" << format_number(r.entropy) << " E[Y*(p)]=" << format_number(r.mixture_modular);
  return make_verdict("entropy_membership", r.entropy_finite == r.mixture_finite, note.str());
}

CheckReport entropy_membership_check(const Expr& p, const QuadratureSpec& spec) {
  return entropy_membership_check(to_field(p, spec.dimension), spec);
}

CheckReport logplus_bracket_check(const EntropyReport& r, double tolerance) {
  if (!r.entropy_finite || !std::isfinite(r.logplus_integral)) {
    // Both sides of the bracket are infinite together; only consistency can be checked.
    return make_verdict("logplus_bracket", !r.entropy_finite && !std::isfinite(r.logplus_integral),
                        "divergent entropy");
  }
  const double tol = tolerance + 2.0 * r.error_estimate;
  const double upper = std::exp(-1.0) - r.logplus_integral;
  std::vector<CheckReport> parts{
      make_le("logplus_bracket.lower", -r.logplus_integral, r.entropy, tol, "", r.error_estimate),
      make_le("logplus_bracket.upper", r.entropy, upper, tol, "", r.error_estimate)};
  return combine("logplus_bracket", parts);
}

CheckReport mixture_split_check(const Field& p, const QuadratureSpec& spec, double tolerance) {
  auto ystar = [](double v) { return young_eval(YoungKind::CoshConj, v); };
  const Field pm = memoize(p);
  const auto whole = finite_expect(map(pm, ystar), spec);
  const auto upper = finite_expect(map(pm, [ystar](double v) { return ystar(std::max(1.0, v)); }), spec);
  const auto lower = finite_expect(map(pm, [ystar](double v) { return ystar(std::min(1.0, v)); }), spec);
  if (!whole || !upper || !lower) {
    // The lower part is bounded, so whole and upper must diverge together.
    return make_verdict("mixture_split", lower && !whole && !upper, "divergent mixture modular");
  }
  const double err = whole->error_estimate + upper->error_estimate + lower->error_estimate;
  return make_eq("mixture_split", whole->value + ystar(1.0), upper->value + lower->value, tolerance + err, "", err);
}

}  // namespace gaussig
