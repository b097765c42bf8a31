// Compiled with -mavx2 only. No FMA: the scalar reference rounds after the
// multiply, and so must we.
#include "gaussig/simd.hpp"

#include <immintrin.h>

#include <cmath>

namespace gaussig::simd {
namespace {

template <class Op, class ScalarOp>
inline void binary(const double* a, const double* b, double* out, std::size_t n, Op op,
                   ScalarOp sop) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
         [](double x, double y) { return x + y; });
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
         [](double x, double y) { return x - y; });
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
         [](double x, double y) { return x * y; });
}

void min(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_min_pd(x, y); },
         [](double x, double y) { return x < y ? x : y; });
}

void max(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_max_pd(x, y); },
         [](double x, double y) { return x > y ? x : y; });
}

void scale(const double* a, double c, double* out, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vc));
  for (; i < n; ++i) out[i] = a[i] * c;
}

void add_scalar(const double* a, double c, double* out, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), vc));
  for (; i < n; ++i) out[i] = a[i] + c;
}

void axpy(double c, const double* x, double* y, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(vc, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + c * x[i];
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

void abs(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, vabs(_mm256_loadu_pd(a + i)));
  for (; i < n; ++i) out[i] = std::fabs(a[i]);
}

void ipow(const double* a, unsigned k, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d base = _mm256_loadu_pd(a + i);
    __m256d acc = _mm256_set1_pd(1.0);
    for (unsigned e = k; e != 0; e >>= 1) {
      if (e & 1u) acc = _mm256_mul_pd(acc, base);
      base = _mm256_mul_pd(base, base);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double base = a[i];
    double acc = 1.0;
    for (unsigned e = k; e != 0; e >>= 1) {
      if (e & 1u) acc = acc * base;
      base = base * base;
    }
    out[i] = acc;
  }
}

inline double reduce_lanes(__m256d s) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, s);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot(const double* w, const double* v, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i)));
  }
  double total = reduce_lanes(s);
  for (; i < n; ++i) total = total + w[i] * v[i];
  return total;
}

double abs_dot(const double* w, const double* v, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s = _mm256_add_pd(s, vabs(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i))));
  }
  double total = reduce_lanes(s);
  for (; i < n; ++i) total = total + std::fabs(w[i] * v[i]);
  return total;
}

bool all_finite(const double* v, std::size_t n) {
  // x - x is NaN exactly when x is inf or NaN.
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(v + i);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(_mm256_sub_pd(x, x), _mm256_sub_pd(x, x), _CMP_UNORD_Q));
  }
  if (_mm256_movemask_pd(bad) != 0) return false;
  for (; i < n; ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable table{Isa::Avx2, add,  sub, mul,  min, max,     scale,
                                 add_scalar, axpy, abs, ipow, dot, abs_dot, all_finite};
  return &table;
}

}  // namespace gaussig::simd
