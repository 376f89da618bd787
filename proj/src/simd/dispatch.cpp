#include <atomic>
#include <cstdlib>
#include <string>

#include "infdoob/simd.hpp"

namespace infdoob::simd {

#if defined(INFDOOB_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(INFDOOB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("INFDOOB_ISA")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(INFDOOB_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_kernel_table();
#endif
  return nullptr;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa select_isa(Isa isa) {
  if (isa == Isa::avx2 && avx2_kernels() == nullptr) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

const KernelTable& kernels() {
  if (active_isa() == Isa::avx2) {
    if (const KernelTable* t = avx2_kernels()) return *t;
  }
  return scalar_kernels();
}

}  // namespace infdoob::simd
