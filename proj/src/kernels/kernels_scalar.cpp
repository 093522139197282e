#include <algorithm>
#include <cmath>

#include "xreg/kernels.hpp"

namespace xreg::kernels::detail {
namespace {

double norm_scalar(const double* row, std::size_t cols, NormKind kind) {
  switch (kind) {
    case NormKind::L1: {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += std::fabs(row[j]);
      return s;
    }
    case NormKind::Linf: {
      double m = 0.0;
      for (std::size_t j = 0; j < cols; ++j) m = std::max(m, std::fabs(row[j]));
      return m;
    }
    case NormKind::L2:
    default: {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * row[j];
      return std::sqrt(s);
    }
  }
}

void row_norms_scalar(const double* data, std::size_t rows, std::size_t cols, NormKind kind,
                      double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = norm_scalar(data + r * cols, cols, kind);
}

void squared_distances_scalar(const double* query, const double* data, std::size_t rows,
                              std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = data + r * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double diff = row[j] - query[j];
      s += diff * diff;
    }
    out[r] = s;
  }
}

double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable scalar_table{
    &row_norms_scalar,
    &squared_distances_scalar,
    &sum_squared_diff_scalar,
    &dot_scalar,
};

}  // namespace xreg::kernels::detail
