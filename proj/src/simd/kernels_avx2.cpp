#include "payctl/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PAYCTL_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define PAYCTL_HAVE_AVX2_KERNELS 0
#endif

namespace payctl::simd::avx2 {

#if PAYCTL_HAVE_AVX2_KERNELS

#define PAYCTL_AVX2 __attribute__((target("avx2,fma")))

bool compiled() { return true; }

namespace {

PAYCTL_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

PAYCTL_AVX2 void axpy_impl(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

PAYCTL_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

PAYCTL_AVX2 void axpy(double a, const double* x, double* y, std::size_t n) {
  axpy_impl(a, x, y, n);
}

PAYCTL_AVX2 void vecmat(const double* v, const double* m, std::size_t rows, std::size_t cols,
                        double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (v[i] == 0.0) continue;
    axpy_impl(v[i], m + i * cols, out, cols);
  }
}

PAYCTL_AVX2 double l1_distance(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
  return total;
}

#else

bool compiled() { return false; }
double dot(const double* x, const double* y, std::size_t n) { return scalar::dot(x, y, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { scalar::axpy(a, x, y, n); }
void vecmat(const double* v, const double* m, std::size_t rows, std::size_t cols, double* out) {
  scalar::vecmat(v, m, rows, cols, out);
}
double l1_distance(const double* x, const double* y, std::size_t n) {
  return scalar::l1_distance(x, y, n);
}

#endif

}  // namespace payctl::simd::avx2
