#include "xreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xreg/errors.hpp"
#include "xreg/kernels.hpp"

namespace xreg {

double norm(std::span<const double> x, NormKind kind) {
  double out = 0.0;
  kernels::row_norms(x, x.size(), kind, std::span<double>(&out, 1));
  return out;
}

std::vector<double> angular(std::span<const double> x, NormKind kind) {
  if (x.empty()) throw DomainError("angular: empty vector");
  const double r = norm(x, kind);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("angular: zero or non-finite vector");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] / r;
  return out;
}

std::vector<double> row_norms(const Matrix& x, NormKind kind) {
  std::vector<double> out(x.rows());
  if (x.rows() > 0) kernels::row_norms(x.values(), x.cols(), kind, out);
  return out;
}

Matrix angles(const Matrix& x, NormKind kind) {
  const auto norms = row_norms(x, kind);
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double r = norms[i];
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw DomainError("angles: row " + std::to_string(i) + " has zero or non-finite norm");
    }
    const auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] / r;
  }
  return out;
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k) {
  if (k > values.size()) throw ParameterError("top_k_indices: k exceeds the number of values");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  };
  if (k < idx.size()) {
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), before);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end(), before);
  return idx;
}

ExtremeSubset select_extremes(const Matrix& v, std::size_t k, NormKind kind) {
  if (k < 1 || k > v.rows()) {
    throw ParameterError("select_extremes: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(v.rows()) + "]");
  }
  const auto norms = row_norms(v, kind);
  ExtremeSubset out;
  out.indices = top_k_indices(norms, k);
  out.threshold = norms[out.indices.back()];
  out.angles = angles(v.select_rows(out.indices), kind);
  out.k = k;
  out.norm_kind = kind;
  return out;
}

double hill_estimator(std::span<const double> values, std::size_t k) {
  if (k < 1 || k + 1 > values.size()) {
    throw ParameterError("hill_estimator: need 1 <= k < n, got k = " + std::to_string(k) +
                         ", n = " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("hill_estimator: values must be positive");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                   std::greater<>());
  const double anchor = std::log(sorted[k]);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(sorted[i]) - anchor;
  const double mean_log = s / static_cast<double>(k);
  if (!(mean_log > 0.0)) throw ParameterError("hill_estimator: top k values are all tied");
  return 1.0 / mean_log;
}

}  // namespace xreg
