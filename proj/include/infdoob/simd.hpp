#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the target supports it, an AVX2 version picked at runtime. Elementwise
// kernels are bit-identical across variants; reductions may differ in the
// last bits because of lane-wise summation order.
namespace infdoob::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  // For each consecutive block of `block` entries: num[b] = sum mu*f,
  // den[b] = sum mu. The two sums use the same association so that f == 1
  // on a block yields num[b] == den[b] exactly.
  void (*block_sums)(const double* mu, const double* f, std::size_t count,
                     std::size_t block, double* num, double* den);
  // acc[i] *= x[i]
  void (*multiply)(double* acc, const double* x, std::size_t count);
  // acc[i] = max(acc[i], x[i])
  void (*maximum)(double* acc, const double* x, std::size_t count);
  // out[i] = x[i] * y[i]
  void (*product)(const double* x, const double* y, double* out,
                  std::size_t count);
  // sum mu[i] * f[i]
  double (*dot)(const double* mu, const double* f, std::size_t count);
};

const KernelTable& scalar_kernels();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

Isa active_isa();
std::string_view isa_name(Isa isa);
// Overrides runtime selection (tests, benchmarking). Selecting avx2 on a host
// without it falls back to scalar; returns the ISA actually in effect.
Isa select_isa(Isa isa);
const KernelTable& kernels();

inline void block_sums(std::span<const double> mu, std::span<const double> f,
                       std::size_t block, std::span<double> num,
                       std::span<double> den) {
  kernels().block_sums(mu.data(), f.data(), f.size(), block, num.data(),
                       den.data());
}
inline void multiply(std::span<double> acc, std::span<const double> x) {
  kernels().multiply(acc.data(), x.data(), acc.size());
}
inline void maximum(std::span<double> acc, std::span<const double> x) {
  kernels().maximum(acc.data(), x.data(), acc.size());
}
inline void product(std::span<const double> x, std::span<const double> y,
                    std::span<double> out) {
  kernels().product(x.data(), y.data(), out.data(), out.size());
}
inline double dot(std::span<const double> mu, std::span<const double> f) {
  return kernels().dot(mu.data(), f.data(), f.size());
}

}  // namespace infdoob::simd
