#include "xreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "xreg/errors.hpp"
#include "xreg/geometry.hpp"
#include "xreg/stats.hpp"

namespace xreg {
namespace {

constexpr double kTopBinClamp = 1.0 - 1e-12;

// Rows ordered by decreasing norm, ties by row index.
std::vector<std::size_t> order_by_norm(const std::vector<double>& norms) {
  return top_k_indices(norms, norms.size());
}

}  // namespace

SpherePartition::SpherePartition(std::size_t p, std::size_t d) : p_(p), d_(d) {
  if (p == 0) throw ParameterError("sphere partition resolution must be >= 1");
  if (d == 0) throw ParameterError("sphere partition dimension must be >= 1");
  if (std::log(static_cast<double>(p)) * static_cast<double>(d) > 63.0 * std::log(2.0)) {
    throw ParameterError("sphere partition has more than 2^63 cells");
  }
}

std::vector<std::size_t> SpherePartition::cell_index(std::span<const double> theta) const {
  if (theta.size() != d_) throw DataError("cell_index: angle dimension mismatch");
  std::vector<std::size_t> idx(d_);
  for (std::size_t j = 0; j < d_; ++j) {
    const double v = std::clamp(theta[j], 0.0, kTopBinClamp);
    idx[j] = std::min(p_ - 1, static_cast<std::size_t>(std::floor(v * static_cast<double>(p_))));
  }
  return idx;
}

std::uint64_t SpherePartition::cell_id(std::span<const double> theta) const {
  const auto idx = cell_index(theta);
  std::uint64_t id = 0;
  for (std::size_t j = d_; j-- > 0;) id = id * p_ + idx[j];
  return id;
}

std::vector<std::size_t> SpherePartition::decode(std::uint64_t id) const {
  std::vector<std::size_t> idx(d_);
  for (std::size_t j = 0; j < d_; ++j) {
    idx[j] = static_cast<std::size_t>(id % p_);
    id /= p_;
  }
  return idx;
}

double StabilityCurve::value_at(std::size_t k_value) const {
  if (k_value == 0) return 0.0;
  const auto it = std::lower_bound(k.begin(), k.end(), k_value);
  if (it == k.end() || *it != k_value) throw ParameterError("value_at: k outside the curve");
  return f_hat[static_cast<std::size_t>(it - k.begin())];
}

std::vector<StabilityCurve> stability_curves(const Dataset& data, const SpherePartition& part,
                                             std::size_t k_max, NormKind norm) {
  data.validate();
  if (part.dim() != data.d()) throw DataError("stability_curves: partition dimension mismatch");
  if (k_max < 1 || k_max > data.n()) {
    throw ParameterError("stability_curves: k_max = " + std::to_string(k_max) + " outside [1, " +
                         std::to_string(data.n()) + "]");
  }
  const auto norms = row_norms(data.x, norm);
  const auto order = order_by_norm(norms);
  const Matrix theta = angles(data.x, norm);

  struct Accumulator {
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<double> angle_sum;
    std::vector<std::pair<std::size_t, double>> changes;  // (k, estimate from k on)
  };
  std::map<std::uint64_t, Accumulator> cells;

  // Every point with norm >= t_k is included, so ties at the threshold enter together.
  std::size_t included = 0;
  std::vector<std::uint64_t> touched;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double threshold = norms[order[k - 1]];
    touched.clear();
    while (included < order.size() && norms[order[included]] >= threshold) {
      const std::size_t i = order[included++];
      const auto row = theta.row(i);
      const std::uint64_t id = part.cell_id(row);
      auto& acc = cells[id];
      if (acc.angle_sum.empty()) acc.angle_sum.assign(data.d(), 0.0);
      acc.sum += data.y[i];
      ++acc.count;
      for (std::size_t j = 0; j < data.d(); ++j) acc.angle_sum[j] += row[j];
      touched.push_back(id);
    }
    for (auto id : touched) {
      auto& acc = cells[id];
      const double value = acc.sum / (1.0 + static_cast<double>(acc.count));
      if (!acc.changes.empty() && acc.changes.back().first == k) {
        acc.changes.back().second = value;
      } else {
        acc.changes.emplace_back(k, value);
      }
    }
  }

  std::vector<StabilityCurve> curves;
  curves.reserve(cells.size());
  for (const auto& [id, acc] : cells) {
    StabilityCurve c;
    c.cell_id = id;
    c.cell_index = part.decode(id);
    c.members = acc.count;
    c.centroid.resize(data.d());
    for (std::size_t j = 0; j < data.d(); ++j) {
      c.centroid[j] = acc.angle_sum[j] / static_cast<double>(acc.count);
    }
    c.k.resize(k_max);
    std::iota(c.k.begin(), c.k.end(), std::size_t{1});
    c.f_hat.assign(k_max, 0.0);
    for (std::size_t ci = 0; ci < acc.changes.size(); ++ci) {
      const std::size_t from = acc.changes[ci].first;
      const std::size_t to = ci + 1 < acc.changes.size() ? acc.changes[ci + 1].first : k_max + 1;
      std::fill(c.f_hat.begin() + static_cast<std::ptrdiff_t>(from - 1),
                c.f_hat.begin() + static_cast<std::ptrdiff_t>(to - 1), acc.changes[ci].second);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::vector<StabilityCurve> omega_filter(std::vector<StabilityCurve> curves, const Dataset& data,
                                         const SpherePartition& part, std::size_t m,
                                         NormKind norm) {
  if (m < 1) throw ParameterError("omega_filter: m must be >= 1");
  if (part.dim() != data.d()) throw DataError("omega_filter: partition dimension mismatch");
  const auto norms = row_norms(data.x, norm);
  const auto top = top_k_indices(norms, std::min(m, data.n()));
  std::vector<std::uint64_t> keep;
  for (auto i : top) keep.push_back(part.cell_id(angular(data.x.row(i), norm)));
  std::sort(keep.begin(), keep.end());
  std::erase_if(curves, [&](const StabilityCurve& c) {
    return !std::binary_search(keep.begin(), keep.end(), c.cell_id);
  });
  return curves;
}

std::vector<IndependenceLevel> radial_angular_independence_check(const Matrix& v,
                                                                 std::span<const double> t_grid,
                                                                 NormKind norm,
                                                                 std::size_t min_exceedances) {
  const auto norms = row_norms(v, norm);
  std::vector<IndependenceLevel> out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ParameterError("independence check: thresholds must be > 0");
    IndependenceLevel level;
    level.t = t;
    std::vector<double> log_radius;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (norms[i] > t) {
        log_radius.push_back(std::log(norms[i] / t));
        rows.push_back(i);
      }
    }
    level.exceedances = rows.size();
    level.flagged = rows.size() < min_exceedances;
    if (rows.size() >= 2) {
      const double mean_log = mean(log_radius);
      level.hill = mean_log > 0.0 ? 1.0 / mean_log : 0.0;
      std::vector<double> coord(rows.size());
      for (std::size_t j = 0; j < v.cols(); ++j) {
        for (std::size_t r = 0; r < rows.size(); ++r) coord[r] = v(rows[r], j) / norms[rows[r]];
        level.max_abs_corr = std::max(level.max_abs_corr, std::fabs(pearson_correlation(log_radius, coord)));
      }
    }
    out.push_back(level);
  }
  return out;
}

std::vector<DriftLevel> conditional_cdf_drift(const Dataset& data, std::span<const double> t_grid,
                                              NormKind norm, std::size_t min_exceedances) {
  data.validate();
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw ParameterError("cdf drift: threshold grid must increase");
  }
  const auto norms = row_norms(data.x, norm);
  const auto responses_above = [&](double t) {
    std::vector<double> ys;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (norms[i] > t) ys.push_back(data.y[i]);
    }
    return ys;
  };
  std::vector<DriftLevel> out;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    DriftLevel level;
    level.t_low = t_grid[i];
    level.t_high = t_grid[i + 1];
    const auto low = responses_above(level.t_low);
    const auto high = responses_above(level.t_high);
    level.n_low = low.size();
    level.n_high = high.size();
    level.flagged = low.size() < min_exceedances || high.size() < min_exceedances;
    if (!low.empty() && !high.empty()) {
      level.ks = ks_distance(low, high);
      const double a = static_cast<double>(low.size());
      const double b = static_cast<double>(high.size());
      level.band = 1.36 * std::sqrt((a + b) / (a * b));
    }
    out.push_back(level);
  }
  return out;
}

double compute_generalization_bound(double m_bound, double vc_dim, double delta, double k,
                                    double c_universal) {
  if (!(m_bound > 0.0)) throw ParameterError("bound: M must be > 0");
  if (!(vc_dim >= 1.0)) throw ParameterError("bound: VC dimension must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("bound: delta must lie in (0, 1)");
  if (!(k >= 1.0)) throw ParameterError("bound: k must be >= 1");
  if (!(c_universal >= 0.0)) throw ParameterError("bound: C must be >= 0");
  const double m2 = m_bound * m_bound;
  const double log_term = std::log(3.0 / delta);
  return 4.0 * m2 / std::sqrt(k) * (c_universal * std::sqrt(vc_dim) + 2.0 * std::sqrt(2.0 * log_term)) +
         8.0 * m2 * log_term / (3.0 * k);
}

}  // namespace xreg
