#include <cstdlib>
#include <string_view>

#include "gaussig/simd.hpp"

namespace gaussig::simd {

#ifndef GAUSSIG_HAVE_AVX2
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool cpu_supports_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable& choose() noexcept {
  const char* env = std::getenv("GAUSSIG_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
  const KernelTable* wide = avx2_kernels();
  if (wide != nullptr && cpu_supports_avx2()) return *wide;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace gaussig::simd
