#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xreg/matrix.hpp"
#include "xreg/norm_kind.hpp"

namespace xreg {

double norm(std::span<const double> x, NormKind kind = NormKind::L2);

/// x / ||x||. Zero or non-finite input is a DomainError.
std::vector<double> angular(std::span<const double> x, NormKind kind = NormKind::L2);

std::vector<double> row_norms(const Matrix& x, NormKind kind = NormKind::L2);

/// Row-wise angular projection.
Matrix angles(const Matrix& x, NormKind kind = NormKind::L2);

/// The k rows of largest norm, in decreasing norm order.
struct ExtremeSubset {
  std::vector<std::size_t> indices;
  double threshold = 0.0;  // k-th largest norm
  Matrix angles;           // k x d, row i is the angle of indices[i]
  std::size_t k = 0;
  NormKind norm_kind = NormKind::L2;
};

/// Indices of the k largest values, largest first; equal values keep the
/// lower index first. O(n + k log k).
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k);

/// Throws ParameterError unless 1 <= k <= v.rows().
ExtremeSubset select_extremes(const Matrix& v, std::size_t k, NormKind kind = NormKind::L2);

/// Hill estimate of the tail index from the k largest values:
/// [ (1/k) sum_{i<=k} log(V_(i) / V_(k+1)) ]^{-1}, with V_(1) >= ... >= V_(n).
/// Needs k + 1 <= n and strictly positive values.
double hill_estimator(std::span<const double> values, std::size_t k);

}  // namespace xreg
