#include "xreg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "xreg/errors.hpp"
#include "xreg/io.hpp"
#include "xreg/kernels.hpp"
#include "xreg/rng.hpp"
#include "xreg/stats.hpp"

namespace xreg {
namespace {

// Standardized training inputs and the k largest rows in every feature map.
struct TrainView {
  const Dataset* data = nullptr;
  Matrix standardized;
  std::vector<std::size_t> top;
  Matrix top_raw;
  Matrix top_standardized;
  Matrix top_angles;
  std::vector<double> top_y;
};

TrainView make_train_view(const Dataset& train, const Standardizer& standardizer, std::size_t k,
                          NormKind norm) {
  if (k < 1 || k > train.n()) {
    throw ParameterError("k_train = " + std::to_string(k) + " outside [1, " +
                         std::to_string(train.n()) + "]");
  }
  TrainView view;
  view.data = &train;
  view.standardized = standardizer.apply(train.x);
  view.top = top_k_indices(row_norms(view.standardized, norm), k);
  view.top_raw = train.x.select_rows(view.top);
  view.top_standardized = view.standardized.select_rows(view.top);
  view.top_angles = angles(view.top_standardized, norm);
  view.top_y.reserve(k);
  for (auto i : view.top) view.top_y.push_back(train.y[i]);
  return view;
}

TrainedModel train_on_view(Regime regime, const RegressorSpec& spec, const TrainView& view,
                           BaselineScale scale) {
  const bool raw = scale == BaselineScale::Raw;
  switch (regime) {
    case Regime::FullX:
      return fit(spec, raw ? view.data->x : view.standardized, view.data->y);
    case Regime::ExtremeX:
      return fit(spec, raw ? view.top_raw : view.top_standardized, view.top_y);
    case Regime::AngularExtreme:
    default:
      return fit(spec, view.top_angles, view.top_y);
  }
}

const Matrix& test_features(const ExtremeTestSet& test, Regime regime, BaselineScale scale) {
  if (regime == Regime::AngularExtreme) return test.angles;
  return scale == BaselineScale::Raw ? test.raw : test.standardized;
}

[[noreturn]] void rethrow_with_context(const std::string& prefix) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const std::exception& e) {
    throw RuntimeError(prefix + e.what());
  }
}

struct CellResult {
  double mse = 0.0;
  double mse_truth = std::numeric_limits<double>::quiet_NaN();
};

struct ReplicationResult {
  ReplicationRecord record;
  std::size_t k_train = 0;
  std::size_t k_test = 0;
  std::vector<CellResult> cells;  // regressor-major, regime-minor
};

RegressorSpec seeded_spec(const RegressorSpec& spec, std::uint64_t stream_seed) {
  RegressorSpec out = spec;
  if (auto* forest = std::get_if<ForestParams>(&out)) {
    forest->seed = split_seed(forest->seed, stream_seed);
    forest->threads = 1;
  }
  return out;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, std::size_t r,
                                  const Dataset* csv_data) {
  ReplicationResult result;
  result.record.index = r;
  result.record.seed = replication_seed(cfg.seed, r);
  Rng rng = make_rng(result.record.seed);

  Dataset train, test;
  std::optional<sim::SimModelConfig> truth;
  if (const auto* src = std::get_if<SimulatedSource>(&cfg.source)) {
    sim::SimModelConfig model = src->model;
    if (model.kind != sim::ModelKind::Multiplicative && src->random_beta) {
      model.beta = sim::draw_uniform_beta(model.d, rng);
    }
    if (model.beta) result.record.beta = *model.beta;
    train = sim::generate(src->n_train, model, rng);
    test = sim::generate(src->n_test, model, rng);
    truth = model;
  } else {
    const auto& csv = std::get<CsvSource>(cfg.source);
    std::tie(train, test) = split_dataset(*csv_data, csv.test_fraction, result.record.seed);
  }
  result.record.n_train = train.n();
  result.record.n_test = test.n();
  result.k_train = cfg.k_rule.resolve(train.n());
  result.k_test = cfg.k_rule.resolve(test.n());

  const Standardizer standardizer = Standardizer::fit(cfg.standardization, train.x);
  const TrainView view = make_train_view(train, standardizer, result.k_train, cfg.norm);
  const ExtremeTestSet ext = prepare_extreme_test(standardizer, test, result.k_test, cfg.norm);

  std::vector<double> truth_values;
  if (truth) {
    truth_values.reserve(ext.raw.rows());
    for (std::size_t i = 0; i < ext.raw.rows(); ++i) {
      truth_values.push_back(sim::regression_function(*truth, ext.raw.row(i)));
    }
  }

  const std::size_t n_regimes = cfg.regimes.size();
  result.cells.resize(cfg.regressors.size() * n_regimes);
  for (std::size_t i = 0; i < cfg.regressors.size(); ++i) {
    for (std::size_t j = 0; j < n_regimes; ++j) {
      const RegressorSpec spec =
          seeded_spec(cfg.regressors[i], split_seed(result.record.seed, 1000 + i * n_regimes + j));
      const TrainedModel model = train_on_view(cfg.regimes[j], spec, view, cfg.baseline_scale);
      const auto preds = predict(model, test_features(ext, cfg.regimes[j], cfg.baseline_scale));
      auto& cell = result.cells[i * n_regimes + j];
      const double k = static_cast<double>(preds.size());
      cell.mse = kernels::sum_squared_diff(preds, ext.y) / k;
      if (truth) cell.mse_truth = kernels::sum_squared_diff(preds, truth_values) / k;
    }
  }
  return result;
}

}  // namespace

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::FullX: return "full_x";
    case Regime::ExtremeX: return "extreme_x";
    case Regime::AngularExtreme:
    default: return "angular_extreme";
  }
}

Regime parse_regime(std::string_view text) {
  if (text == "full_x" || text == "full") return Regime::FullX;
  if (text == "extreme_x" || text == "extreme") return Regime::ExtremeX;
  if (text == "angular_extreme" || text == "angular") return Regime::AngularExtreme;
  throw ParameterError("unknown regime '" + std::string(text) +
                       "' (expected full_x, extreme_x or angular_extreme)");
}

std::size_t KRule::resolve(std::size_t n) const {
  std::size_t k = 0;
  switch (kind) {
    case Kind::SqrtN: {
      k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
      while (k * k > n) --k;
      while ((k + 1) * (k + 1) <= n) ++k;
      break;
    }
    case Kind::FractionOfN:
      k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
      break;
    case Kind::Fixed:
      k = fixed;
      break;
  }
  if (k < 1 || k > n) {
    throw ParameterError("k rule " + describe() + " gives k = " + std::to_string(k) +
                         " for n = " + std::to_string(n) + " (need 1 <= k <= n)");
  }
  return k;
}

std::string KRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::SqrtN: os << "sqrt"; break;
    case Kind::FractionOfN: os << "fraction:" << fraction; break;
    case Kind::Fixed: os << "fixed:" << fixed; break;
  }
  return os.str();
}

KRule KRule::parse(const std::string& text) {
  if (text == "sqrt") return KRule{};
  try {
    if (text.rfind("fraction:", 0) == 0) {
      const std::string tail = text.substr(9);
      std::size_t used = 0;
      const double p = std::stod(tail, &used);
      if (used != tail.size() || !(p > 0.0 && p <= 1.0)) throw ParameterError("range");
      return KRule{Kind::FractionOfN, p, 0};
    }
    if (text.rfind("fixed:", 0) == 0) {
      const std::string tail = text.substr(6);
      if (tail.empty() || !std::all_of(tail.begin(), tail.end(), ::isdigit)) {
        throw ParameterError("digits");
      }
      const auto k = static_cast<std::size_t>(std::stoull(tail));
      if (k < 1) throw ParameterError("range");
      return KRule{Kind::Fixed, 0.0, k};
    }
  } catch (const std::exception&) {
    throw ParameterError("invalid k rule '" + text +
                         "' (expected sqrt, fraction:<p> with 0 < p <= 1, or fixed:<k> with k >= 1)");
  }
  throw ParameterError("invalid k rule '" + text + "' (expected sqrt, fraction:<p> or fixed:<k>)");
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
  };
  if (std::holds_alternative<std::monostate>(source)) fail("data.source", "a data source is required");
  if (replications < 1) fail("experiment.replications", "must be >= 1");
  if (regressors.empty()) fail("experiment.regressors", "at least one regressor is required");
  if (regimes.empty()) fail("experiment.regimes", "at least one regime is required");
  if (standardization.kind == Standardization::Kind::ExactPareto && !(standardization.alpha > 0.0)) {
    fail("experiment.standardization", "alpha must be > 0");
  }
  for (const auto& spec : regressors) {
    try {
      xreg::validate(spec);
    } catch (const ParameterError& e) {
      fail("experiment.regressors", e.what());
    }
  }
  const auto check_k = [&](std::size_t n, const char* what) {
    try {
      k_rule.resolve(n);
    } catch (const ParameterError& e) {
      fail("experiment.k_rule", std::string(e.what()) + " (" + what + ")");
    }
  };
  if (const auto* sim_src = std::get_if<SimulatedSource>(&source)) {
    if (sim_src->n_train < 1) fail("data.n_train", "must be >= 1");
    if (sim_src->n_test < 1) fail("data.n_test", "must be >= 1");
    sim::SimModelConfig model = sim_src->model;
    if (sim_src->random_beta && model.kind != sim::ModelKind::Multiplicative) {
      model.beta = std::vector<double>(model.d, 0.5);
    }
    try {
      model.validate();
    } catch (const std::exception& e) {
      fail("data.model", e.what());
    }
    check_k(sim_src->n_train, "n_train");
    check_k(sim_src->n_test, "n_test");
  } else if (const auto* csv = std::get_if<CsvSource>(&source)) {
    if (csv->path.empty()) fail("data.path", "a CSV path is required");
    if (csv->target.empty()) fail("data.target", "a target column is required");
    if (!(csv->test_fraction > 0.0 && csv->test_fraction < 1.0)) {
      fail("data.test_fraction", "must lie in (0, 1)");
    }
  }
}

AlgorithmOneResult run_algorithm1(const Dataset& train, std::size_t k, const RegressorSpec& spec,
                                  NormKind norm, const Standardization& standardization) {
  train.validate();
  Standardizer standardizer = Standardizer::fit(standardization, train.x);
  const Matrix v = standardizer.apply(train.x);
  ExtremeSubset extremes = select_extremes(v, k, norm);
  std::vector<double> y;
  y.reserve(k);
  for (auto i : extremes.indices) y.push_back(train.y[i]);
  TrainedModel model = fit(spec, extremes.angles, y);
  return AlgorithmOneResult{std::move(model), std::move(standardizer), std::move(extremes), norm};
}

std::vector<double> predict_angular(const AlgorithmOneResult& fitted, const Matrix& x) {
  return predict(fitted.model, angles(fitted.standardizer.apply(x), fitted.norm));
}

ExtremeTestSet prepare_extreme_test(const Standardizer& standardizer, const Dataset& test,
                                    std::size_t k_test, NormKind norm) {
  if (k_test < 1 || k_test > test.n()) {
    throw ParameterError("k_test = " + std::to_string(k_test) + " outside [1, " +
                         std::to_string(test.n()) + "]");
  }
  const Matrix v = standardizer.apply(test.x);
  ExtremeTestSet out;
  out.indices = top_k_indices(row_norms(v, norm), k_test);
  out.raw = test.x.select_rows(out.indices);
  out.standardized = v.select_rows(out.indices);
  out.angles = angles(out.standardized, norm);
  out.y.reserve(k_test);
  for (auto i : out.indices) out.y.push_back(test.y[i]);
  return out;
}

double extreme_mse(const TrainedModel& model, const ExtremeTestSet& test, Regime regime,
                   BaselineScale baseline_scale) {
  const auto preds = predict(model, test_features(test, regime, baseline_scale));
  return kernels::sum_squared_diff(preds, test.y) / static_cast<double>(preds.size());
}

double evaluate_extreme_mse(const TrainedModel& model, const Standardizer& standardizer,
                            const Dataset& test, std::size_t k_test, Regime regime, NormKind norm,
                            BaselineScale baseline_scale) {
  return extreme_mse(model, prepare_extreme_test(standardizer, test, k_test, norm), regime,
                     baseline_scale);
}

TrainedModel train_regime(Regime regime, const RegressorSpec& spec, const Dataset& train,
                          const Standardizer& standardizer, std::size_t k_train, NormKind norm,
                          BaselineScale baseline_scale) {
  return train_on_view(regime, spec, make_train_view(train, standardizer, k_train, norm),
                       baseline_scale);
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double test_fraction,
                                          std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ParameterError("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.n();
  const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n)));
  if (n_test < 1 || n_test >= n) {
    throw ParameterError("split of " + std::to_string(n) + " rows leaves an empty side");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(perm[i], perm[pick(rng)]);
  }
  std::vector<std::size_t> test_idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {data.subset(train_idx), data.subset(test_idx)};
}

double MseRow::standard_error() const {
  return replications == 0 ? 0.0 : std_mse / std::sqrt(static_cast<double>(replications));
}

const MseRow* MseReport::find(const std::string& regressor, Regime regime) const {
  for (const auto& row : rows) {
    if (row.regressor == regressor && row.regime == regime) return &row;
  }
  return nullptr;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t r) noexcept {
  return split_seed(master, r);
}

std::vector<std::string> regressor_labels(const std::vector<RegressorSpec>& specs) {
  std::map<std::string, std::size_t> seen;
  std::vector<std::string> labels;
  for (const auto& spec : specs) {
    const std::string base = regressor_name(spec);
    const std::size_t count = ++seen[base];
    labels.push_back(count == 1 ? base : base + "#" + std::to_string(count));
  }
  return labels;
}

MseReport run_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<Dataset> csv_data;
  if (const auto* csv = std::get_if<CsvSource>(&cfg.source)) csv_data = io::load_dataset(*csv);

  const std::size_t reps = cfg.replications;
  std::vector<ReplicationResult> results(reps);
  std::vector<std::exception_ptr> errors(reps);
  const auto work = [&](std::size_t r) {
    try {
      results[r] = run_replication(cfg, r, csv_data ? &*csv_data : nullptr);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  std::size_t threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min(threads, reps);
  if (threads <= 1) {
    for (std::size_t r = 0; r < reps; ++r) work(r);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t r = w; r < reps; r += threads) work(r);
      });
    }
  }

  for (std::size_t r = 0; r < reps; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (...) {
      rethrow_with_context("replication " + std::to_string(r) + " (seed " +
                           std::to_string(replication_seed(cfg.seed, r)) + ") failed: ");
    }
  }

  MseReport report;
  const auto labels = regressor_labels(cfg.regressors);
  for (std::size_t i = 0; i < cfg.regressors.size(); ++i) {
    report.hyperparameters.emplace_back(labels[i], describe(cfg.regressors[i]));
  }
  for (const auto& res : results) report.replications.push_back(res.record);

  const std::size_t n_regimes = cfg.regimes.size();
  for (std::size_t i = 0; i < cfg.regressors.size(); ++i) {
    for (std::size_t j = 0; j < n_regimes; ++j) {
      MseRow row;
      row.regressor = labels[i];
      row.regime = cfg.regimes[j];
      RunningStats stats;
      RunningStats truth_stats;
      for (const auto& res : results) {
        const auto& cell = res.cells[i * n_regimes + j];
        stats.push(cell.mse);
        row.per_replication.push_back(cell.mse);
        if (!std::isnan(cell.mse_truth)) truth_stats.push(cell.mse_truth);
      }
      row.mean_mse = stats.mean();
      row.std_mse = stats.sample_std();
      row.replications = stats.count();
      row.k_train = results.front().k_train;
      row.k_test = results.front().k_test;
      if (truth_stats.count() > 0) row.mean_mse_vs_truth = truth_stats.mean();
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace xreg
