#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "xreg/kernels.hpp"

namespace xreg::kernels::detail {
namespace {

double norm_neon(const double* row, std::size_t cols, NormKind kind) {
  const std::size_t blocked = cols & ~std::size_t{1};
  std::size_t j = 0;
  switch (kind) {
    case NormKind::L1: {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (; j < blocked; j += 2) acc = vaddq_f64(acc, vabsq_f64(vld1q_f64(row + j)));
      double s = vaddvq_f64(acc);
      for (; j < cols; ++j) s += std::fabs(row[j]);
      return s;
    }
    case NormKind::Linf: {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (; j < blocked; j += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(row + j)));
      double m = vmaxvq_f64(acc);
      for (; j < cols; ++j) m = std::max(m, std::fabs(row[j]));
      return m;
    }
    case NormKind::L2:
    default: {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (; j < blocked; j += 2) {
        const float64x2_t v = vld1q_f64(row + j);
        acc = vaddq_f64(acc, vmulq_f64(v, v));
      }
      double s = vaddvq_f64(acc);
      for (; j < cols; ++j) s += row[j] * row[j];
      return std::sqrt(s);
    }
  }
}

void row_norms_neon(const double* data, std::size_t rows, std::size_t cols, NormKind kind,
                    double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = norm_neon(data + r * cols, cols, kind);
}

double sum_squared_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t diff = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vaddq_f64(acc, vmulq_f64(diff, diff));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

void squared_distances_neon(const double* query, const double* data, std::size_t rows,
                            std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = sum_squared_diff_neon(data + r * cols, query, cols);
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable neon_table{
    &row_norms_neon,
    &squared_distances_neon,
    &sum_squared_diff_neon,
    &dot_neon,
};

}  // namespace xreg::kernels::detail
