#pragma once

// Heavy-tailed regression data with a known limit angular regression function.
//
// Inputs follow a symmetric logistic dependence structure (parameter xi) with
// Pareto(alpha) margins. Responses come from one of three noise models:
//
//   Additive        Y = f(X) + eps0,        f(x) = beta' theta(x) (1 - 1 / (2 sqrt|x|))
//   Multiplicative  Y = eps1 * g(X),         g(x) = cos(1/|x|) sum_i theta_{2i-1} sin(pi theta_{2i})
//   Combined        Y = eps1 * f(X) + eps0
//
// with eps0 = Z0 1{|Z0| <= 1}, Z0 ~ N(0, sigma^2) and eps1 = Z1 1{0 <= Z1 <= 2},
// Z1 ~ N(mu_noise, sigma^2). |x| is the Euclidean norm and theta(x) = x / |x|.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "xreg/dataset.hpp"
#include "xreg/matrix.hpp"
#include "xreg/rng.hpp"

namespace xreg::sim {

enum class ModelKind { Additive, Multiplicative, Combined };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

struct SimModelConfig {
  ModelKind kind = ModelKind::Additive;
  std::size_t d = 2;
  double xi = 1.0;
  double alpha = 3.0;
  double sigma = 0.1;
  /// Required for Additive and Combined, absent for Multiplicative.
  std::optional<std::vector<double>> beta;
  double mu_noise = 1.0;
  std::uint64_t seed = 0;

  // Degenerate-noise switches (tests only): eps0 == 0 and eps1 == 1 respectively.
  bool zero_additive_noise = false;
  bool unit_multiplicative_noise = false;

  /// Throws ParameterError on out-of-range values, ConfigError on a beta/kind mismatch.
  void validate() const;
};

/// Positive stable variate with Laplace transform E exp(-l S) = exp(-l^xi),
/// drawn with the Chambers-Mallows-Stuck (Kanter) representation. S == 1 when xi == 1.
double sample_positive_stable(double xi, Rng& rng);

/// n draws of the logistic(xi) / Pareto(alpha) design. Entries are >= 1.
Matrix sample_logistic_pareto(std::size_t n, const SimModelConfig& cfg, Rng& rng);

Dataset gen_additive(std::size_t n, const SimModelConfig& cfg, Rng& rng);
Dataset gen_multiplicative(std::size_t n, const SimModelConfig& cfg, Rng& rng);
Dataset gen_combined(std::size_t n, const SimModelConfig& cfg, Rng& rng);

/// Dispatches on cfg.kind.
Dataset generate(std::size_t n, const SimModelConfig& cfg, Rng& rng);

/// generate() with a stream seeded from cfg.seed.
Dataset simulate(std::size_t n, const SimModelConfig& cfg);

/// Noise-free regression function at a finite point x (f for Additive and
/// Combined, g for Multiplicative).
double regression_function(const SimModelConfig& cfg, std::span<const double> x);

/// Analytic limit of the regression function along direction theta
/// (beta' theta, or sum_i theta_{2i-1} sin(pi theta_{2i})). theta must be a
/// nonnegative unit vector in the Euclidean norm (within 1e-9), else DomainError.
double true_angular_fn(const SimModelConfig& cfg, std::span<const double> theta);

/// Almost-sure bound M on |Y| for the configured model.
double response_bound(const SimModelConfig& cfg);

/// beta ~ Uniform[0,1]^d.
std::vector<double> draw_uniform_beta(std::size_t d, Rng& rng);

}  // namespace xreg::sim
