#include "gaussig/quadrature.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/random/sobol.hpp>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <random>

#include "gaussig/error.hpp"
#include "gaussig/simd.hpp"

namespace gaussig {

namespace {

constexpr double kTruncation = 37.0;   // phi(37) ~ 1e-298
constexpr double kTailStart = 24.0;    // phi(24) ~ 1e-126
constexpr double kTailWeight = 1e-125;
constexpr double kNegligibleDensity = 1e-250;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::GaussHermite: return "gauss-hermite";
    case Scheme::Qmc: return "qmc";
    case Scheme::Piecewise1d: return "piecewise-1d";
  }
  return "?";
}

void QuadratureSpec::validate() const {
  if (dimension == 0) throw ConfigError("quadrature dimension must be positive");
  switch (scheme) {
    case Scheme::GaussHermite:
      if (dimension > 4) throw ConfigError("Gauss-Hermite tensor rule is limited to n <= 4");
      if (order == 1) throw ConfigError("Gauss-Hermite order must be at least 2");
      break;
    case Scheme::Qmc:
      if (samples < 1024) throw ConfigError("QMC needs at least 1024 samples");
      break;
    case Scheme::Piecewise1d:
      if (dimension != 1) throw ConfigError("piecewise scheme is one-dimensional");
      break;
  }
}

QuadratureSpec QuadratureSpec::gauss_hermite(std::size_t n, std::size_t m) {
  QuadratureSpec s;
  s.scheme = Scheme::GaussHermite;
  s.dimension = n;
  s.order = m;
  return s;
}

QuadratureSpec QuadratureSpec::qmc(std::size_t n, std::size_t samples, std::uint64_t seed) {
  QuadratureSpec s;
  s.scheme = Scheme::Qmc;
  s.dimension = n;
  s.samples = samples;
  s.seed = seed;
  return s;
}

QuadratureSpec QuadratureSpec::piecewise() {
  QuadratureSpec s;
  s.scheme = Scheme::Piecewise1d;
  s.dimension = 1;
  return s;
}

QuadratureSpec QuadratureSpec::for_dimension(std::size_t n, std::uint64_t seed) {
  if (n <= 4) return gauss_hermite(n);
  return qmc(n, 1u << 14, seed);
}

std::size_t max_gh_order(std::size_t n) {
  switch (n) {
    case 1: return 1024;
    case 2: return 256;
    case 3: return 32;
    default: return 16;
  }
}

std::size_t default_gh_order(std::size_t n) {
  static const long env = [] {
    const char* s = std::getenv("GAUSSIG_QUAD_ORDER");
    return s ? std::strtol(s, nullptr, 10) : 0L;
  }();
  if (env >= 2) return std::min<std::size_t>(static_cast<std::size_t>(env), max_gh_order(n));
  switch (n) {
    case 1: return 64;
    case 2: return 32;
    case 3: return 16;
    default: return 8;
  }
}

double Tolerance::allowed(double value) const { return std::max(abs, rel * std::fabs(value)); }

// ---------------------------------------------------------------- Gauss-Hermite

namespace {

struct Level {
  double value;
  double tail;
};

Level gh_level(const Field& f, std::size_t n, std::size_t m) {
  const Rule& r = gauss_hermite_rule(m);
  const std::size_t k = r.nodes.size();
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= k;

  std::vector<double> coords, weights, tail_mask;
  coords.reserve(n * total);
  weights.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  std::vector<std::vector<double>> axis(n);
  for (std::size_t t = 0; t < total; ++t) {
    double w = 1.0;
    for (std::size_t d = 0; d < n; ++d) w *= r.weights[idx[d]];
    if (w >= 1e-300) {
      weights.push_back(w);
      tail_mask.push_back(w < kTailWeight ? 1.0 : 0.0);
      for (std::size_t d = 0; d < n; ++d) axis[d].push_back(r.nodes[idx[d]]);
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (++idx[d] < k) break;
      idx[d] = 0;
    }
  }
  const std::size_t count = weights.size();
  for (std::size_t d = 0; d < n; ++d) coords.insert(coords.end(), axis[d].begin(), axis[d].end());

  std::vector<double> values(count);
  f.eval(coords.data(), count, values.data());
  const simd::KernelTable& kt = simd::active();
  if (!kt.all_finite(values.data(), count)) throw NonFinite("integrand is not finite at a quadrature node");

  Level lv{kt.dot(weights.data(), values.data(), count), 0.0};
  std::vector<double> tw(count);
  kt.mul(weights.data(), tail_mask.data(), tw.data(), count);
  lv.tail = kt.abs_dot(tw.data(), values.data(), count);
  return lv;
}

// ---------------------------------------------------------------- QMC

// Sums of f over Sobol points [0, count), reported for the first half and the whole.
struct QmcSums {
  double first_half;
  double all;
};

QmcSums qmc_sums(const Field& f, std::size_t n, std::size_t count, std::uint64_t seed) {
  boost::random::sobol gen(static_cast<unsigned>(n));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(n);
  for (double& s : shift) s = unif(rng);
  const boost::math::normal_distribution<double> normal;

  constexpr std::size_t chunk = 4096;
  const simd::KernelTable& kt = simd::active();
  std::vector<double> ones(chunk, 1.0);
  QmcSums sums{0.0, 0.0};
  std::vector<double> coords, values;
  for (std::size_t start = 0; start < count; start += chunk) {
    const std::size_t len = std::min(chunk, count - start);
    coords.assign(n * len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t d = 0; d < n; ++d) {
        const std::uint64_t v = gen();
        double u = std::ldexp(static_cast<double>(v >> 11) + 0.5, -53) + shift[d];
        if (u >= 1.0) u -= 1.0;
        u = std::clamp(u, 1e-16, 1.0 - 1e-16);
        coords[d * len + i] = boost::math::quantile(normal, u);
      }
    }
    values.resize(len);
    f.eval(coords.data(), len, values.data());
    if (!kt.all_finite(values.data(), len)) throw NonFinite("integrand is not finite at a sample point");
    const std::size_t half = count / 2;
    if (start < half) {
      const std::size_t in_half = std::min(len, half - start);
      sums.first_half += kt.dot(ones.data(), values.data(), in_half);
    }
    sums.all += kt.dot(ones.data(), values.data(), len);
  }
  return sums;
}

// ---------------------------------------------------------------- piecewise

// Mass of |f phi| in the shell 1e-13..1e-11 from e over the mass in 1e-9..1e-7
// (scaled by max(1, |e|)), on the side `dir`. x^-s gives 10^(-4(1-s)): about
// 1e-4 for bounded f, 1 for a logarithmic divergence. 0 when the outer shell
// carries no mass.
template <class F>
double endpoint_shell_ratio(const F& integrand, boost::math::quadrature::tanh_sinh<double>& ts, double e, double dir) {
  const double s = std::max(1.0, std::fabs(e));
  auto shell = [&](double lo, double hi) {
    auto g = [&](double u) { return std::fabs(integrand(e + dir * u)); };
    try {
      return ts.integrate(g, lo * s, hi * s, 1e-6);
    } catch (const NonFinite&) {
      return std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double outer = shell(1e-9, 1e-7);
  const double inner = shell(1e-13, 1e-11);
  if (!std::isfinite(inner)) return std::numeric_limits<double>::infinity();
  if (!(outer > 0.0)) return inner > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return inner / outer;
}

IntegralResult piecewise_expect(const Field& f, const QuadratureSpec& spec, const Tolerance& tol) {
  std::vector<double> cuts{-kTruncation, -kTailStart, kTailStart, kTruncation};
  // Tanh-sinh samples the middle of a long segment sparsely; unit cuts over the
  // bulk of the Gaussian keep features near the origin resolved.
  for (int k = -8; k <= 8; ++k) cuts.push_back(k);
  for (double b : f.breakpoints()) {
    if (std::fabs(b) < kTruncation) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::fabs(a - b) < 1e-10 * std::max(1.0, std::fabs(a)); }),
             cuts.end());

  auto integrand = [&f](double x) {
    const double w = phi(x);
    if (w < kNegligibleDensity) return 0.0;
    const double v = f({x});
    if (!std::isfinite(v)) throw NonFinite("integrand is not finite at a quadrature node");
    return v * w;
  };

  boost::math::quadrature::tanh_sinh<double> ts(15);
  double value = 0.0, error = 0.0, tail = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    double err = 0.0;
    double part = 0.0;
    // Integrate over u in [0, b - a] so the left end sits at 0: the finite-interval
    // path of Boost 1.74 otherwise evaluates near-left abscissae as avg + diff * z,
    // which can round onto a singular endpoint. Points that still round onto an
    // endpoint are moved one ulp inside.
    const double len = b - a;
    // A non-finite value within 1e-30 of an endpoint is an integrable endpoint
    // singularity met in floating point (x^2 underflowing, say) and is dropped.
    const double near_a = 1e-30 * std::max(1.0, std::fabs(a)), near_b = 1e-30 * std::max(1.0, std::fabs(b));
    auto shifted = [&](double u) {
      double x = u < 0.5 * len ? a + u : b - (len - u);
      if (x <= a) x = std::nextafter(a, b);
      if (x >= b) x = std::nextafter(b, a);
      if (x - a < near_a || b - x < near_b) {
        const double w = phi(x);
        const double v = f({x});
        return std::isfinite(v) ? v * w : 0.0;
      }
      return integrand(x);
    };
    try {
      part = ts.integrate(shifted, 0.0, len, 1e-12, &err);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw NonFinite(std::string("tanh-sinh failed: ") + e.what());
    }
    if (!std::isfinite(part)) throw NonFinite("integrand is not finite on a segment");
    value += part;
    error += std::isfinite(err) ? err : std::fabs(part);
    if (a >= kTailStart || b <= -kTailStart) tail += std::fabs(part);
  }
  IntegralResult res{value, error, spec};
  res.spec.scheme = Scheme::Piecewise1d;
  for (double e : f.breakpoints()) {
    if (std::fabs(e) >= kTailStart) continue;
    for (double dir : {-1.0, 1.0}) {
      const double ratio = endpoint_shell_ratio(integrand, ts, e, dir);
      if (ratio > 0.5) {
        throw NoConvergence("integrand is not integrable at x = " + std::to_string(e), value,
                            std::numeric_limits<double>::infinity());
      }
    }
  }
  if (tail > tol.allowed(value)) {
    throw NoConvergence("integrand carries mass beyond |x| = 24 (tail " + std::to_string(tail) + ")", value,
                        std::max(error, tail));
  }
  if (error > tol.allowed(value)) {
    throw NoConvergence("tanh-sinh error estimate above tolerance", value, error);
  }
  return res;
}

}  // namespace

IntegralResult gauss_expect(const Field& f, const QuadratureSpec& spec_in, const Tolerance& tol) {
  QuadratureSpec spec = spec_in;
  spec.validate();
  if (f.dim() != spec.dimension) {
    throw DimensionMismatch("field has dimension " + std::to_string(f.dim()) + ", quadrature spec " +
                            std::to_string(spec.dimension));
  }
  const std::size_t n = spec.dimension;

  if (spec.scheme == Scheme::Piecewise1d ||
      (n == 1 && spec.split_at_kinks && spec.scheme == Scheme::GaussHermite && !f.breakpoints().empty())) {
    return piecewise_expect(f, spec, tol);
  }

  if (spec.scheme == Scheme::GaussHermite) {
    const std::size_t cap = max_gh_order(n);
    std::size_t m = std::min(spec.order == 0 ? default_gh_order(n) : spec.order, cap);
    // Without room to refine upward, compare against the next-coarser order.
    Level prev = gh_level(f, n, 2 * m > cap ? std::max<std::size_t>(2, m / 2) : m);
    Level cur = prev;
    double err = 0.0;
    for (int r = 0; r < std::max(1, tol.max_refinements); ++r) {
      if (r > 0 || 2 * m <= cap) {
        if (2 * m > cap) break;
        m *= 2;
      }
      cur = gh_level(f, n, m);
      err = std::fabs(cur.value - prev.value);
      if (cur.tail > tol.allowed(cur.value)) {
        throw NoConvergence("integrand carries mass beyond |x| = 24", cur.value, std::max(err, cur.tail));
      }
      if (err <= tol.allowed(cur.value)) {
        spec.order = m;
        return {cur.value, err, spec};
      }
      prev = cur;
    }
    // On the line, analytic integrands with nearby complex poles (steep
    // sigmoids) outrun the Gauss-Hermite ladder; adaptive tanh-sinh settles them.
    if (n == 1 && std::isfinite(cur.value)) {
      try {
        return piecewise_expect(f, spec, tol);
      } catch (const NoConvergence&) {
      } catch (const NonFinite&) {
      }
    }
    throw NoConvergence("Gauss-Hermite refinement did not converge (order " + std::to_string(m) + ")", cur.value,
                        err);
  }

  // QMC
  std::size_t N = spec.samples;
  double value = 0.0, err = 0.0;
  for (int r = 0; r <= std::max(0, tol.max_refinements); ++r) {
    const QmcSums s = qmc_sums(f, n, N, spec.seed);
    value = s.all / static_cast<double>(N);
    const double coarse = s.first_half / static_cast<double>(N / 2);
    err = std::fabs(value - coarse);
    if (err <= tol.allowed(value)) {
      spec.samples = N;
      return {value, err, spec};
    }
    if (N > (std::size_t{1} << 22)) break;
    N *= 2;
  }
  throw NoConvergence("QMC refinement did not converge (" + std::to_string(N) + " samples)", value, err);
}

IntegralResult gauss_expect(const Expr& f, const QuadratureSpec& spec, const Tolerance& tol) {
  return gauss_expect(to_field(f, spec.dimension), spec, tol);
}

std::optional<IntegralResult> try_gauss_expect(const Field& f, const QuadratureSpec& spec, const Tolerance& tol) {
  try {
    return gauss_expect(f, spec, tol);
  } catch (const NonFinite&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const NoConvergence& e) {
    auto accept = [](const NoConvergence& x) {
      return std::isfinite(x.last_value()) && x.last_error() <= 1e-3 * std::max(1.0, std::fabs(x.last_value()));
    };
    if (accept(e)) return IntegralResult{e.last_value(), e.last_error(), spec};
    // Kinks slow Gauss-Hermite down without making it diverge: a moderate
    // stall gets a second run refined up to the order cap.
    const bool moderate = std::isfinite(e.last_value()) && e.last_error() <= 0.1 * std::max(1.0, std::fabs(e.last_value()));
    if (spec.scheme != Scheme::GaussHermite || !moderate || tol.max_refinements >= 8) return std::nullopt;
    Tolerance deeper = tol;
    deeper.max_refinements = 8;
    try {
      return gauss_expect(f, spec, deeper);
    } catch (const NoConvergence& again) {
      if (accept(again)) return IntegralResult{again.last_value(), again.last_error(), spec};
    } catch (const NonFinite&) {
    } catch (const DomainError&) {
    }
    // Oblique kinks in two or more dimensions defeat the tensor rule; the
    // randomized lattice does not care about them.
    if (spec.dimension < 2) return std::nullopt;
    try {
      const IntegralResult r = gauss_expect(f, QuadratureSpec::qmc(spec.dimension, 1 << 14, spec.seed), tol);
      return IntegralResult{r.value, r.error_estimate, spec};
    } catch (const NoConvergence& again) {
      if (accept(again)) return IntegralResult{again.last_value(), again.last_error(), spec};
    } catch (const NonFinite&) {
    } catch (const DomainError&) {
    }
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- balls

namespace {

double gl_segment(const std::function<double(double)>& g, double a, double b, std::size_t q) {
  const Rule& r = gauss_legendre_rule(q);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * g(mid + half * r.nodes[i]);
  return s * half;
}

double gl_split(const std::function<double(double)>& g, double a, double b, const std::vector<double>& breaks,
                std::size_t q) {
  std::vector<double> cuts{a, b};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += gl_segment(g, cuts[i], cuts[i + 1], q);
  return s;
}

// Nested integral over the ball of radius rho in the trailing `left` coordinates,
// with the leading coordinates fixed in `prefix`; x_k = rho sin t removes the
// square-root endpoint behaviour.
double nested_ball(const Field& f, std::vector<double>& prefix, std::size_t left, double rho, std::size_t q) {
  if (left == 1) {
    return gl_segment(
        [&](double x) {
          prefix.push_back(x);
          const double v = f(prefix);
          prefix.pop_back();
          return v;
        },
        -rho, rho, q);
  }
  return gl_segment(
      [&](double t) {
        const double c = std::cos(t);
        prefix.push_back(rho * std::sin(t));
        const double v = rho * c * nested_ball(f, prefix, left - 1, rho * c, q);
        prefix.pop_back();
        return v;
      },
      -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, q);
}

double ball_level(const Field& f, double R, const std::vector<double>& radial_breaks, std::size_t q) {
  const std::size_t n = f.dim();
  auto check = [](double v) {
    if (!std::isfinite(v)) throw NonFinite("integrand is not finite at a quadrature node");
    return v;
  };
  if (n == 1) {
    return gl_split([&](double x) { return check(f({x})); }, -R, R, f.breakpoints(), q);
  }
  if (n == 2) {
    const std::size_t K = 2 * q;
    return gl_split(
        [&](double r) {
          double s = 0.0;
          for (std::size_t k = 0; k < K; ++k) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
            s += check(f({r * std::cos(th), r * std::sin(th)}));
          }
          return r * s * 2.0 * std::numbers::pi / static_cast<double>(K);
        },
        0.0, R, radial_breaks, q);
  }
  std::vector<double> prefix;
  return check(nested_ball(f, prefix, n, R, q));
}

void collect_radii(const Expr& e, std::vector<double>& out) {
  if (e.op() == Op::IndicatorBall) out.push_back(e.node().value);
  if (e.op() == Op::ComposeAffine) return;
  for (const Expr& k : e.node().kids) collect_radii(k, out);
}

}  // namespace

IntegralResult lebesgue_integral_ball(const Field& f, double R, const Tolerance& tol, std::vector<double> radial_breaks) {
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  const std::size_t n = f.dim();
  const std::size_t cap = n == 1 ? 1024 : n == 2 ? 256 : 32;
  std::size_t q = n <= 2 ? 16 : 8;
  double prev = ball_level(f, R, radial_breaks, q);
  double cur = prev, err = 0.0;
  for (int r = 0; r < std::max(1, tol.max_refinements + 2) && 2 * q <= cap; ++r) {
    q *= 2;
    cur = ball_level(f, R, radial_breaks, q);
    err = std::fabs(cur - prev);
    if (err <= tol.allowed(cur)) {
      QuadratureSpec spec;
      spec.dimension = n;
      spec.order = q;
      return {cur, err, spec};
    }
    prev = cur;
  }
  throw NoConvergence("ball integral did not converge", cur, err);
}

IntegralResult lebesgue_integral_ball(const Expr& f, double R, std::size_t dim, const Tolerance& tol) {
  std::vector<double> radii;
  collect_radii(f, radii);
  return lebesgue_integral_ball(to_field(f, dim), R, tol, radii);
}

// ---------------------------------------------------------------- mollifier

namespace {

double bump_profile_sq(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

std::size_t default_mollifier_order(std::size_t n) {
  switch (n) {
    case 1: return 64;
    case 2: return 32;
    case 3: return 16;
    default: return 8;
  }
}

}  // namespace

double bump_mass(std::size_t n) {
  // Radial integral: |S^{n-1}| * int_0^1 r^{n-1} e^{-1/(1-r^2)} dr.
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * static_cast<double>(n)) / std::tgamma(0.5 * static_cast<double>(n));
  boost::math::quadrature::tanh_sinh<double> ts;
  const double radial = ts.integrate([n](double r) { return std::pow(r, static_cast<double>(n) - 1.0) * bump_profile_sq(r * r); },
                                     0.0, 1.0);
  return sphere * radial;
}

Field mollify(const Field& f, double lambda, std::size_t order) {
  if (!(lambda > 0.0)) throw DomainError("mollifier scale must be positive");
  const std::size_t n = f.dim();
  const std::size_t q = order == 0 ? default_mollifier_order(n) : order;
  const Rule& r = gauss_legendre_rule(q);

  if (n == 1) {
    // Split [-1, 1] where x - lambda z crosses a breakpoint of f; normalize by
    // the same segmented sum so constants are reproduced to rounding.
    const std::vector<double> fb = f.breakpoints();
    std::vector<double> out_breaks;
    for (double b : fb) {
      out_breaks.push_back(b - lambda);
      out_breaks.push_back(b);
      out_breaks.push_back(b + lambda);
    }
    return Field(
        1,
        [f, lambda, fb, rp = &r](const double* coords, std::size_t count, double* out) {
          std::vector<double> pts, wts;
          std::vector<std::size_t> owner;
          for (std::size_t i = 0; i < count; ++i) {
            const double x = coords[i];
            std::vector<double> cuts{-1.0, 1.0};
            for (double b : fb) {
              const double z = (x - b) / lambda;
              if (z > -1.0 && z < 1.0) cuts.push_back(z);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
              const double half = 0.5 * (cuts[s + 1] - cuts[s]), mid = 0.5 * (cuts[s + 1] + cuts[s]);
              for (std::size_t k = 0; k < rp->nodes.size(); ++k) {
                const double z = mid + half * rp->nodes[k];
                const double w = rp->weights[k] * half * bump_profile_sq(z * z);
                if (w == 0.0) continue;
                pts.push_back(x - lambda * z);
                wts.push_back(w);
                owner.push_back(i);
              }
            }
          }
          std::vector<double> vals(pts.size());
          f.eval(pts.data(), pts.size(), vals.data());
          std::vector<double> num(count, 0.0), den(count, 0.0);
          for (std::size_t k = 0; k < pts.size(); ++k) {
            num[owner[k]] += wts[k] * vals[k];
            den[owner[k]] += wts[k];
          }
          for (std::size_t i = 0; i < count; ++i) out[i] = num[i] / den[i];
        },
        std::move(out_breaks));
  }

  // Tensor rule on the cube, bump weights normalized once.
  std::vector<double> zs, ws;
  std::size_t total = 1;
  for (std::size_t d = 0; d < n; ++d) total *= q;
  std::vector<std::size_t> idx(n, 0);
  double mass = 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    double w = 1.0, r2 = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      w *= r.weights[idx[d]];
      r2 += r.nodes[idx[d]] * r.nodes[idx[d]];
    }
    w *= bump_profile_sq(r2);
    if (w > 0.0) {
      for (std::size_t d = 0; d < n; ++d) zs.push_back(r.nodes[idx[d]]);
      ws.push_back(w);
      mass += w;
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (++idx[d] < q) break;
      idx[d] = 0;
    }
  }
  for (double& w : ws) w /= mass;
  return Field(n, [f, lambda, n, zs, ws](const double* coords, std::size_t count, double* out) {
    const std::size_t Q = ws.size();
    std::vector<double> pts(n * Q), vals(Q);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < Q; ++k) {
        for (std::size_t d = 0; d < n; ++d) pts[d * Q + k] = coords[d * count + i] - lambda * zs[k * n + d];
      }
      f.eval(pts.data(), Q, vals.data());
      out[i] = simd::active().dot(ws.data(), vals.data(), Q);
    }
  });
}

Field mollify(const Expr& f, std::size_t dim, double lambda, std::size_t order) {
  return mollify(to_field(f, dim), lambda, order);
}

}  // namespace gaussig
