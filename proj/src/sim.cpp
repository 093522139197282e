#include "xreg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "xreg/errors.hpp"
#include "xreg/geometry.hpp"

namespace xreg::sim {
namespace {

bool uses_beta(ModelKind kind) { return kind != ModelKind::Multiplicative; }

double additive_signal(std::span<const double> beta, std::span<const double> x, double r) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += beta[j] * (x[j] / r);
  return s * (1.0 - 1.0 / (2.0 * std::sqrt(r)));
}

double multiplicative_signal(std::span<const double> x, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    s += (x[i] / r) * std::sin((x[i + 1] / r) * std::numbers::pi);
  }
  return std::cos(1.0 / r) * s;
}

double draw_eps0(const SimModelConfig& cfg, Rng& rng) {
  if (cfg.zero_additive_noise) return 0.0;
  std::normal_distribution<double> gauss(0.0, cfg.sigma);
  const double z = gauss(rng);
  return std::fabs(z) <= 1.0 ? z : 0.0;
}

double draw_eps1(const SimModelConfig& cfg, Rng& rng) {
  if (cfg.unit_multiplicative_noise) return 1.0;
  std::normal_distribution<double> gauss(cfg.mu_noise, cfg.sigma);
  const double z = gauss(rng);
  return (z >= 0.0 && z <= 2.0) ? z : 0.0;
}

void require_kind(const SimModelConfig& cfg, ModelKind kind, const char* op) {
  cfg.validate();
  if (cfg.kind != kind) {
    throw ConfigError(std::string(op) + ": config kind is " + std::string(to_string(cfg.kind)));
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Multiplicative: return "multiplicative";
    case ModelKind::Combined: return "combined";
    case ModelKind::Additive:
    default: return "additive";
  }
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::Additive, ModelKind::Multiplicative, ModelKind::Combined}) {
    if (text == to_string(k)) return k;
  }
  throw ParameterError("unknown model '" + std::string(text) +
                       "' (expected additive, multiplicative or combined)");
}

void SimModelConfig::validate() const {
  if (!(xi > 0.0 && xi <= 1.0)) throw ParameterError("xi must lie in (0, 1]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be > 0");
  if (d < 1) throw ParameterError("d must be >= 1");
  if (kind == ModelKind::Multiplicative && d % 2 != 0) {
    throw ConfigError("multiplicative model needs an even dimension, got d = " + std::to_string(d));
  }
  if (uses_beta(kind)) {
    if (!beta) throw ConfigError(std::string(to_string(kind)) + " model needs beta");
    if (beta->size() != d) {
      throw ConfigError("beta has " + std::to_string(beta->size()) + " entries, d = " +
                        std::to_string(d));
    }
    for (double b : *beta) {
      if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("beta entries must lie in [0, 1]");
    }
  } else if (beta) {
    throw ConfigError("multiplicative model takes no beta");
  }
}

double sample_positive_stable(double xi, Rng& rng) {
  if (!(xi > 0.0 && xi <= 1.0)) throw ParameterError("positive stable exponent must lie in (0, 1]");
  if (xi == 1.0) return 1.0;
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::exponential_distribution<double> expo(1.0);
  double u = 0.0;
  while (u == 0.0) u = angle(rng);
  double w = 0.0;
  while (w == 0.0) w = expo(rng);
  const double a = std::sin(xi * u) / std::pow(std::sin(u), 1.0 / xi);
  const double b = std::pow(std::sin((1.0 - xi) * u) / w, (1.0 - xi) / xi);
  return a * b;
}

Matrix sample_logistic_pareto(std::size_t n, const SimModelConfig& cfg, Rng& rng) {
  if (n < 1) throw ParameterError("sample size must be >= 1");
  if (!(cfg.xi > 0.0 && cfg.xi <= 1.0)) throw ParameterError("xi must lie in (0, 1]");
  if (!(cfg.alpha > 0.0)) throw ParameterError("alpha must be > 0");
  if (cfg.d < 1) throw ParameterError("d must be >= 1");

  std::exponential_distribution<double> expo(1.0);
  Matrix x(n, cfg.d);
  const double inv_alpha = 1.0 / cfg.alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sample_positive_stable(cfg.xi, rng);
    for (std::size_t j = 0; j < cfg.d; ++j) {
      double w = 0.0;
      while (w == 0.0) w = expo(rng);
      // Unit Frechet margin, then exact Pareto(alpha) quantile of its cdf value.
      const double z = std::pow(s / w, cfg.xi);
      const double tail = -std::expm1(-1.0 / z);  // 1 - exp(-1/z)
      x(i, j) = tail > 0.0 ? std::pow(tail, -inv_alpha) : std::numeric_limits<double>::max();
    }
  }
  return x;
}

Dataset gen_additive(std::size_t n, const SimModelConfig& cfg, Rng& rng) {
  require_kind(cfg, ModelKind::Additive, "gen_additive");
  Dataset out{sample_logistic_pareto(n, cfg, rng), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.y[i] = regression_function(cfg, out.x.row(i)) + draw_eps0(cfg, rng);
  }
  return out;
}

Dataset gen_multiplicative(std::size_t n, const SimModelConfig& cfg, Rng& rng) {
  require_kind(cfg, ModelKind::Multiplicative, "gen_multiplicative");
  Dataset out{sample_logistic_pareto(n, cfg, rng), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.y[i] = draw_eps1(cfg, rng) * regression_function(cfg, out.x.row(i));
  }
  return out;
}

Dataset gen_combined(std::size_t n, const SimModelConfig& cfg, Rng& rng) {
  require_kind(cfg, ModelKind::Combined, "gen_combined");
  Dataset out{sample_logistic_pareto(n, cfg, rng), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double eps1 = draw_eps1(cfg, rng);
    const double eps0 = draw_eps0(cfg, rng);
    out.y[i] = eps1 * regression_function(cfg, out.x.row(i)) + eps0;
  }
  return out;
}

Dataset generate(std::size_t n, const SimModelConfig& cfg, Rng& rng) {
  switch (cfg.kind) {
    case ModelKind::Multiplicative: return gen_multiplicative(n, cfg, rng);
    case ModelKind::Combined: return gen_combined(n, cfg, rng);
    case ModelKind::Additive:
    default: return gen_additive(n, cfg, rng);
  }
}

Dataset simulate(std::size_t n, const SimModelConfig& cfg) {
  Rng rng = make_rng(cfg.seed);
  return generate(n, cfg, rng);
}

double regression_function(const SimModelConfig& cfg, std::span<const double> x) {
  if (x.size() != cfg.d) throw DataError("regression_function: dimension mismatch");
  const double r = norm(x, NormKind::L2);
  if (!(r > 0.0)) throw DomainError("regression_function: zero input");
  if (cfg.kind == ModelKind::Multiplicative) return multiplicative_signal(x, r);
  if (!cfg.beta) throw ConfigError("regression_function: beta missing");
  return additive_signal(*cfg.beta, x, r);
}

double true_angular_fn(const SimModelConfig& cfg, std::span<const double> theta) {
  if (theta.size() != cfg.d) throw DataError("true_angular_fn: dimension mismatch");
  if (std::fabs(norm(theta, NormKind::L2) - 1.0) > 1e-9) {
    throw DomainError("true_angular_fn: theta is not a unit vector");
  }
  if (std::any_of(theta.begin(), theta.end(), [](double v) { return v < 0.0; })) {
    throw DomainError("true_angular_fn: theta has a negative component");
  }
  if (cfg.kind == ModelKind::Multiplicative) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < theta.size(); i += 2) {
      s += theta[i] * std::sin(theta[i + 1] * std::numbers::pi);
    }
    return s;
  }
  if (!cfg.beta) throw ConfigError("true_angular_fn: beta missing");
  double s = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) s += (*cfg.beta)[j] * theta[j];
  return s;
}

double response_bound(const SimModelConfig& cfg) {
  double beta_l1 = 0.0;
  if (cfg.beta) {
    for (double b : *cfg.beta) beta_l1 += std::fabs(b);
  }
  switch (cfg.kind) {
    case ModelKind::Multiplicative: return 2.0 * static_cast<double>(cfg.d / 2);
    case ModelKind::Combined: return 2.0 * beta_l1 + 1.0;
    case ModelKind::Additive:
    default: return beta_l1 + 1.0;
  }
}

std::vector<double> draw_uniform_beta(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> beta(d);
  for (auto& b : beta) b = unif(rng);
  return beta;
}

}  // namespace xreg::sim
