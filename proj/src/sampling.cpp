#include "gaussig/sampling.hpp"

namespace gaussig {

double uniform(Rng& rng, double lo, double hi) {
  // Explicit mapping instead of std::uniform_real_distribution so streams are
  // identical across standard libraries.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

namespace {

void monomials(std::size_t dim, unsigned degree, Monomial& cur, std::size_t axis, std::vector<Monomial>& out) {
  if (axis == dim) {
    out.push_back(cur);
    return;
  }
  unsigned used = 0;
  for (std::size_t j = 0; j < axis; ++j) used += cur[j];
  for (unsigned e = 0; e + used <= degree; ++e) {
    cur[axis] = e;
    monomials(dim, degree, cur, axis + 1, out);
  }
  cur[axis] = 0;
}

}  // namespace

Expr random_polynomial(Rng& rng, std::size_t dim, unsigned degree, double scale) {
  Monomial cur(dim, 0);
  std::vector<Monomial> all;
  monomials(dim, degree, cur, 0, all);
  Polynomial p;
  for (const Monomial& m : all) p[m] = uniform(rng, -scale, scale);
  return from_polynomial(p);
}

}  // namespace gaussig
