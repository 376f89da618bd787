// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "infdoob/simd.hpp"

namespace infdoob::simd {

const KernelTable& avx2_kernel_table();

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void block_sums_avx2(const double* mu, const double* f, std::size_t count,
                     std::size_t block, double* num, double* den) {
  const std::size_t blocks = count / block;
  if (block < 4) {
    for (std::size_t b = 0; b < blocks; ++b) {
      double n = 0.0;
      double d = 0.0;
      for (std::size_t i = b * block; i < (b + 1) * block; ++i) {
        n += mu[i] * f[i];
        d += mu[i];
      }
      num[b] = n;
      den[b] = d;
    }
    return;
  }
  const std::size_t vec_end = block & ~std::size_t{3};
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* m = mu + b * block;
    const double* x = f + b * block;
    __m256d vn = _mm256_setzero_pd();
    __m256d vd = _mm256_setzero_pd();
    for (std::size_t i = 0; i < vec_end; i += 4) {
      const __m256d vm = _mm256_loadu_pd(m + i);
      vn = _mm256_fmadd_pd(vm, _mm256_loadu_pd(x + i), vn);
      vd = _mm256_add_pd(vd, vm);
    }
    double n = hsum(vn);
    double d = hsum(vd);
    for (std::size_t i = vec_end; i < block; ++i) {
      n = std::fma(m[i], x[i], n);
      d += m[i];
    }
    num[b] = n;
    den[b] = d;
  }
}

void multiply_avx2(double* acc, const double* x, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_mul_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < count; ++i) acc[i] *= x[i];
}

void maximum_avx2(double* acc, const double* x, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_max_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < count; ++i) acc[i] = std::max(acc[i], x[i]);
}

void product_avx2(const double* x, const double* y, double* out,
                  std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < count; ++i) out[i] = x[i] * y[i];
}

double dot_avx2(const double* mu, const double* f, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(mu + i), _mm256_loadu_pd(f + i), acc);
  }
  double s = hsum(acc);
  for (; i < count; ++i) s = std::fma(mu[i], f[i], s);
  return s;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{block_sums_avx2, multiply_avx2, maximum_avx2,
                                 product_avx2, dot_avx2};
  return table;
}

}  // namespace infdoob::simd
