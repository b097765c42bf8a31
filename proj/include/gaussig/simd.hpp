#pragma once

// Data-parallel kernels behind the batched expression evaluator and the
// quadrature reductions. Every kernel has a scalar reference implementation;
// AVX2 variants are compiled into their own translation unit and chosen at
// runtime. Variants are required to be bit-identical to the reference: the
// reductions use a fixed four-lane blocked summation order in both.

#include <cstddef>
#include <string_view>

namespace gaussig::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // out[i] = a[i] op b[i]
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // min/max follow the x86 convention: a < b ? a : b, a > b ? a : b.
  void (*min)(const double* a, const double* b, double* out, std::size_t n);
  void (*max)(const double* a, const double* b, double* out, std::size_t n);
  void (*scale)(const double* a, double c, double* out, std::size_t n);
  void (*add_scalar)(const double* a, double c, double* out, std::size_t n);
  // y[i] += c * x[i]
  void (*axpy)(double c, const double* x, double* y, std::size_t n);
  void (*abs)(const double* a, double* out, std::size_t n);
  // out[i] = a[i]^k by binary exponentiation
  void (*ipow)(const double* a, unsigned k, double* out, std::size_t n);
  // sum_i w[i] * v[i]
  double (*dot)(const double* w, const double* v, std::size_t n);
  // sum_i |w[i] * v[i]|
  double (*abs_dot)(const double* w, const double* v, std::size_t n);
  bool (*all_finite)(const double* v, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels() noexcept;

bool cpu_supports_avx2() noexcept;

/// Kernel table chosen once per process: AVX2 when compiled in and supported
/// by the CPU, unless GAUSSIG_SIMD=scalar is set in the environment.
const KernelTable& active() noexcept;

}  // namespace gaussig::simd
