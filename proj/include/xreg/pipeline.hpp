#pragma once

// Least squares minimization in the extremes, the comparison protocol
// against regressors trained on raw inputs, and report assembly.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "xreg/dataset.hpp"
#include "xreg/geometry.hpp"
#include "xreg/regressors.hpp"
#include "xreg/sim.hpp"
#include "xreg/standardize.hpp"

namespace xreg {

enum class Regime { FullX, ExtremeX, AngularExtreme };

std::string_view to_string(Regime regime) noexcept;
Regime parse_regime(std::string_view text);

/// Number of extremes as a function of the sample size.
struct KRule {
  enum class Kind { SqrtN, FractionOfN, Fixed };
  Kind kind = Kind::SqrtN;
  double fraction = 0.1;
  std::size_t fixed = 0;

  /// floor(sqrt(n)), floor(fraction * n) or fixed. Throws ParameterError
  /// unless the result lies in [1, n].
  std::size_t resolve(std::size_t n) const;

  /// "sqrt", "fraction:<p>" or "fixed:<k>".
  std::string describe() const;
  static KRule parse(const std::string& text);

  friend bool operator==(const KRule&, const KRule&) = default;
};

/// Input scale the FullX and ExtremeX baselines are trained on.
enum class BaselineScale { Raw, Standardized };

struct SimulatedSource {
  sim::SimModelConfig model;
  /// Draw beta ~ U[0,1]^d per replication instead of using model.beta.
  bool random_beta = true;
  std::size_t n_train = 10000;
  std::size_t n_test = 100000;
};

struct CsvSource {
  std::string path;
  std::string target;  // column name or zero-based index
  std::vector<std::string> features;
  double test_fraction = 1.0 / 3.0;
};

using DataSource = std::variant<std::monostate, SimulatedSource, CsvSource>;

struct ExperimentConfig {
  DataSource source;
  KRule k_rule;
  NormKind norm = NormKind::L2;
  std::vector<RegressorSpec> regressors{OlsParams{}, KnnParams{}, TreeParams{}, ForestParams{}};
  std::vector<Regime> regimes{Regime::FullX, Regime::ExtremeX, Regime::AngularExtreme};
  std::size_t replications = 20;
  std::uint64_t seed = 0;
  Standardization standardization{};
  BaselineScale baseline_scale = BaselineScale::Raw;
  std::size_t threads = 1;  // replications run concurrently; 0 = hardware concurrency

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Output of the angular ERM procedure: a regressor on angles of standardized inputs.
struct AlgorithmOneResult {
  TrainedModel model;
  Standardizer standardizer;
  ExtremeSubset extremes;  // over the standardized training inputs
  NormKind norm = NormKind::L2;
};

/// Standardize, keep the k largest-norm training points, and fit `spec` on
/// their angles against the matching responses.
AlgorithmOneResult run_algorithm1(const Dataset& train, std::size_t k, const RegressorSpec& spec,
                                  NormKind norm, const Standardization& standardization);

/// h(theta(T(x))) for every row of x.
std::vector<double> predict_angular(const AlgorithmOneResult& fitted, const Matrix& x);

/// The k_test largest-norm test points under the train-fitted standardizer,
/// with every feature map a regime may need.
struct ExtremeTestSet {
  std::vector<std::size_t> indices;
  Matrix raw;
  Matrix standardized;
  Matrix angles;
  std::vector<double> y;
};

ExtremeTestSet prepare_extreme_test(const Standardizer& standardizer, const Dataset& test,
                                    std::size_t k_test, NormKind norm);

/// Mean squared error of `model` on the extreme test set, feeding it the
/// inputs of the regime it was trained under.
double extreme_mse(const TrainedModel& model, const ExtremeTestSet& test, Regime regime,
                   BaselineScale baseline_scale = BaselineScale::Raw);

double evaluate_extreme_mse(const TrainedModel& model, const Standardizer& standardizer,
                            const Dataset& test, std::size_t k_test, Regime regime, NormKind norm,
                            BaselineScale baseline_scale = BaselineScale::Raw);

/// Fit `spec` under `regime`. FullX uses every training row, ExtremeX the
/// k_train largest rows (selected on the standardized scale), AngularExtreme
/// the angles of those rows.
TrainedModel train_regime(Regime regime, const RegressorSpec& spec, const Dataset& train,
                          const Standardizer& standardizer, std::size_t k_train, NormKind norm,
                          BaselineScale baseline_scale = BaselineScale::Raw);

/// Uniform random split: floor(test_fraction * n) test rows, the rest train.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double test_fraction,
                                          std::uint64_t seed);

struct MseRow {
  std::string regressor;
  Regime regime = Regime::FullX;
  double mean_mse = 0.0;
  double std_mse = 0.0;  // sample standard deviation over replications
  std::size_t replications = 0;
  std::size_t k_train = 0;
  std::size_t k_test = 0;
  std::vector<double> per_replication;
  /// Simulated sources: MSE against the noise-free regression function.
  std::optional<double> mean_mse_vs_truth;

  double standard_error() const;
};

struct ReplicationRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<double> beta;
};

struct MseReport {
  std::vector<MseRow> rows;
  std::vector<ReplicationRecord> replications;
  std::vector<std::pair<std::string, std::string>> hyperparameters;  // label -> describe()

  const MseRow* find(const std::string& regressor, Regime regime) const;
};

/// Runs every replication, training each (regressor, regime) pair and scoring
/// it on the extreme test set. A failing replication aborts the run with a
/// RuntimeError naming its seed.
MseReport run_comparison(const ExperimentConfig& cfg);

/// Seed of replication r.
std::uint64_t replication_seed(std::uint64_t master, std::size_t r) noexcept;

/// Unique row labels for a regressor list ("ols", "rf", "ridge#2", ...).
std::vector<std::string> regressor_labels(const std::vector<RegressorSpec>& specs);

}  // namespace xreg
