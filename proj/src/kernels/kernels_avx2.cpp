// Compiled with -mavx2 (no -mfma, so products and sums round separately).
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "xreg/kernels.hpp"

namespace xreg::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double norm_avx2(const double* row, std::size_t cols, NormKind kind) {
  const std::size_t blocked = cols & ~std::size_t{3};
  std::size_t j = 0;
  switch (kind) {
    case NormKind::L1: {
      __m256d acc = _mm256_setzero_pd();
      for (; j < blocked; j += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(row + j)));
      double s = hsum(acc);
      for (; j < cols; ++j) s += std::fabs(row[j]);
      return s;
    }
    case NormKind::Linf: {
      __m256d acc = _mm256_setzero_pd();
      for (; j < blocked; j += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(row + j)));
      double m = hmax(acc);
      for (; j < cols; ++j) m = std::max(m, std::fabs(row[j]));
      return m;
    }
    case NormKind::L2:
    default: {
      __m256d acc = _mm256_setzero_pd();
      for (; j < blocked; j += 4) {
        const __m256d v = _mm256_loadu_pd(row + j);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
      }
      double s = hsum(acc);
      for (; j < cols; ++j) s += row[j] * row[j];
      return std::sqrt(s);
    }
  }
}

void row_norms_avx2(const double* data, std::size_t rows, std::size_t cols, NormKind kind,
                    double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = norm_avx2(data + r * cols, cols, kind);
}

double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t blocked = n & ~std::size_t{7};
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < blocked; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

void squared_distances_avx2(const double* query, const double* data, std::size_t rows,
                            std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = sum_squared_diff_avx2(data + r * cols, query, cols);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t blocked = n & ~std::size_t{7};
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < blocked; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable avx2_table{
    &row_norms_avx2,
    &squared_distances_avx2,
    &sum_squared_diff_avx2,
    &dot_avx2,
};

}  // namespace xreg::kernels::detail
