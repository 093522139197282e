#pragma once

// Stability-region analysis of conditional means over sphere cells, empirical
// checks of the regular-variation assumptions, and the uniform deviation bound.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xreg/dataset.hpp"
#include "xreg/norm_kind.hpp"

namespace xreg {

/// Coordinate-grid partition of the sphere: an angle theta lies in the cell
/// with multi-index (floor(min(theta_j, 1 - 1e-12) * p))_j. Negative
/// coordinates are clamped to bin 0.
class SpherePartition {
 public:
  /// Throws ParameterError for p == 0, d == 0, or p^d beyond 2^63.
  SpherePartition(std::size_t p, std::size_t d);

  std::size_t resolution() const noexcept { return p_; }
  std::size_t dim() const noexcept { return d_; }

  std::vector<std::size_t> cell_index(std::span<const double> theta) const;
  /// Base-p encoding of cell_index, first coordinate least significant.
  std::uint64_t cell_id(std::span<const double> theta) const;
  std::vector<std::size_t> decode(std::uint64_t id) const;

 private:
  std::size_t p_;
  std::size_t d_;
};

struct StabilityCurve {
  std::uint64_t cell_id = 0;
  std::vector<std::size_t> cell_index;
  /// Mean angle of the cell members at k = k_max.
  std::vector<double> centroid;
  std::vector<std::size_t> k;     // 1..k_max
  std::vector<double> f_hat;      // estimate at each k
  std::size_t members = 0;        // cell size at k_max

  /// f_hat at a given k; 0 at k == 0 (empty sums).
  double value_at(std::size_t k_value) const;
};

/// For each k <= k_max and each cell reached by the k largest-norm points:
///   f(k, j) = sum Y_i 1{|X_i| >= t_k, X_i in cell j} / (1 + #{|X_i| >= t_k, X_i in cell j})
/// with t_k the k-th largest norm. Curves are ordered by cell id.
std::vector<StabilityCurve> stability_curves(const Dataset& data, const SpherePartition& part,
                                             std::size_t k_max, NormKind norm = NormKind::L2);

/// Keeps the curves whose cell holds at least one of the m largest-norm observations.
std::vector<StabilityCurve> omega_filter(std::vector<StabilityCurve> curves, const Dataset& data,
                                         const SpherePartition& part, std::size_t m,
                                         NormKind norm = NormKind::L2);

struct IndependenceLevel {
  double t = 0.0;
  std::size_t exceedances = 0;
  bool flagged = false;          // fewer than min_exceedances points
  double hill = 0.0;             // 1 / mean log(|V| / t) over exceedances
  double max_abs_corr = 0.0;     // max_j |corr(log(|V| / t), theta_j)|
};

/// Inputs are expected on a unit-Pareto scale.
std::vector<IndependenceLevel> radial_angular_independence_check(
    const Matrix& v, std::span<const double> t_grid, NormKind norm = NormKind::L2,
    std::size_t min_exceedances = 50);

struct DriftLevel {
  double t_low = 0.0;
  double t_high = 0.0;
  std::size_t n_low = 0;
  std::size_t n_high = 0;
  double ks = 0.0;
  /// 1.36 * sqrt((n_low + n_high) / (n_low * n_high)), the 95% two-sample KS scale.
  double band = 0.0;
  bool flagged = false;
};

/// KS distances between the laws of Y given |X| > t at consecutive levels of
/// an increasing grid. Descriptive only.
std::vector<DriftLevel> conditional_cdf_drift(const Dataset& data, std::span<const double> t_grid,
                                              NormKind norm = NormKind::L2,
                                              std::size_t min_exceedances = 50);

/// 4 M^2 / sqrt(k) (C sqrt(V) + 2 sqrt(2 log(3/delta))) + 8 M^2 log(3/delta) / (3k).
/// C is an unspecified universal constant; 1 by convention.
double compute_generalization_bound(double m_bound, double vc_dim, double delta, double k,
                                    double c_universal = 1.0);

}  // namespace xreg
