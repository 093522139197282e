#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "xreg/matrix.hpp"

namespace xreg {

/// Per-column empirical cdf F_j(v) = #{i : X_ij <= v} / (n + 1) of a training
/// matrix. Immutable once fitted.
class FittedMarginTransform {
 public:
  FittedMarginTransform() = default;

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_column(std::size_t j) const { return sorted_.at(j); }

  double cdf(std::size_t column, double value) const;

  /// 1 / (1 - F_j(value)) = (n + 1) / (n + 1 - count), in [1, n + 1].
  double pareto_scale(std::size_t column, double value) const;

 private:
  friend FittedMarginTransform fit_empirical_transform(const Matrix& train_x);

  std::size_t n_ = 0;
  std::vector<std::vector<double>> sorted_;
};

/// Throws DataError on an empty or non-finite matrix.
FittedMarginTransform fit_empirical_transform(const Matrix& train_x);

/// Rank-based unit-Pareto standardization using the training margins.
Matrix apply_empirical_transform(const FittedMarginTransform& t, const Matrix& x);

/// v = 1 / (1 - F(x)) = x^alpha for Pareto(alpha) margins. Entries below 1 are a DomainError.
Matrix exact_pareto_transform(const Matrix& x, double alpha);

struct Standardization {
  enum class Kind { None, EmpiricalRank, ExactPareto };
  Kind kind = Kind::EmpiricalRank;
  double alpha = 1.0;  // ExactPareto only

  std::string describe() const;
  /// "none", "empirical", or "exact:<alpha>".
  static Standardization parse(const std::string& text);

  friend bool operator==(const Standardization&, const Standardization&) = default;
};

/// A standardization fitted on training inputs, applicable to any later matrix.
class Standardizer {
 public:
  static Standardizer fit(const Standardization& method, const Matrix& train_x);

  Matrix apply(const Matrix& x) const;
  const Standardization& method() const noexcept { return method_; }
  const FittedMarginTransform* empirical() const noexcept {
    return method_.kind == Standardization::Kind::EmpiricalRank ? &margins_ : nullptr;
  }

 private:
  Standardization method_;
  FittedMarginTransform margins_;
};

}  // namespace xreg
