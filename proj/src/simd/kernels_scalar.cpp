#include "gaussig/simd.hpp"

#include <cmath>

namespace gaussig::simd {
namespace {

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void min(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] < b[i] ? a[i] : b[i];
}

void max(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > b[i] ? a[i] : b[i];
}

void scale(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * c;
}

void add_scalar(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + c;
}

void axpy(double c, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + c * x[i];
}

void abs(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i]);
}

void ipow(const double* a, unsigned k, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double base = a[i];
    double acc = 1.0;
    for (unsigned e = k; e != 0; e >>= 1) {
      if (e & 1u) acc = acc * base;
      base = base * base;
    }
    out[i] = acc;
  }
}

// Four partial sums, lane j accumulating indices i with i % 4 == j, then
// ((s0 + s1) + (s2 + s3)) + tail. The AVX2 variant reproduces this order.
double dot(const double* w, const double* v, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) s[j] = s[j] + w[i + j] * v[i + j];
  }
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) total = total + w[i] * v[i];
  return total;
}

double abs_dot(const double* w, const double* v, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) s[j] = s[j] + std::fabs(w[i + j] * v[i + j]);
  }
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) total = total + std::fabs(w[i] * v[i]);
  return total;
}

bool all_finite(const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Isa::Scalar, add, sub,  mul, min,     max,     scale,
                                 add_scalar, axpy, abs, ipow, dot, abs_dot, all_finite};
  return table;
}

}  // namespace gaussig::simd
