#pragma once

#include <cstddef>
#include <span>

namespace xreg {

/// Streaming mean / variance (Welford), mergeable across partitions (Chan et al.).
class RunningStats {
 public:
  void push(double value) noexcept;
  void merge(const RunningStats& other) noexcept;

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased (n - 1) variance; 0 for fewer than two values.
  double sample_variance() const noexcept;
  double sample_std() const noexcept;
  /// sample_std / sqrt(n).
  double standard_error() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

/// Pearson correlation; 0 when either series is constant.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Two-sample Kolmogorov-Smirnov statistic sup_v |F_a(v) - F_b(v)|.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Ordinary least-squares slope of y on x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace xreg
