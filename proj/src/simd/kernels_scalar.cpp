#include <algorithm>

#include "infdoob/simd.hpp"

namespace infdoob::simd {
namespace {

void block_sums_scalar(const double* mu, const double* f, std::size_t count,
                       std::size_t block, double* num, double* den) {
  const std::size_t blocks = count / block;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* m = mu + b * block;
    const double* x = f + b * block;
    double n = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < block; ++i) {
      n += m[i] * x[i];
      d += m[i];
    }
    num[b] = n;
    den[b] = d;
  }
}

void multiply_scalar(double* acc, const double* x, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) acc[i] *= x[i];
}

void maximum_scalar(double* acc, const double* x, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) acc[i] = std::max(acc[i], x[i]);
}

void product_scalar(const double* x, const double* y, double* out,
                    std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = x[i] * y[i];
}

double dot_scalar(const double* mu, const double* f, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += mu[i] * f[i];
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{block_sums_scalar, multiply_scalar,
                                 maximum_scalar, product_scalar, dot_scalar};
  return table;
}

}  // namespace infdoob::simd
