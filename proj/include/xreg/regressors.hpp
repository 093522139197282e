#pragma once

// Least-squares learners used for the empirical risk minimization step.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xreg/matrix.hpp"

namespace xreg {

struct OlsParams {
  friend bool operator==(const OlsParams&, const OlsParams&) = default;
};

struct RidgeParams {
  double lambda = 1.0;
  friend bool operator==(const RidgeParams&, const RidgeParams&) = default;
};

struct KnnParams {
  std::size_t k_neighbors = 5;  // Euclidean metric
  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct TreeParams {
  std::size_t max_depth = std::numeric_limits<std::size_t>::max();
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0 means all d features
  bool bootstrap = true;
  TreeParams tree;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // 0 means hardware concurrency
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Linear epsilon-insensitive regression, 0.5 |w|^2 + C sum max(0, |r_i| - eps),
/// minimized by full-batch subgradient descent with step step0 / sqrt(epoch).
struct LinearSvrParams {
  double epsilon = 0.0;
  double c_reg = 1.0;
  std::size_t n_epochs = 1000;
  double step0 = 0.1;
  friend bool operator==(const LinearSvrParams&, const LinearSvrParams&) = default;
};

using RegressorSpec =
    std::variant<OlsParams, RidgeParams, KnnParams, TreeParams, ForestParams, LinearSvrParams>;

/// Short label: "ols", "ridge", "knn", "tree", "rf", "svr".
std::string regressor_name(const RegressorSpec& spec);

/// Hyperparameters as "key=value" pairs separated by ';'.
std::string describe(const RegressorSpec& spec);

/// Throws ParameterError when a hyperparameter is outside its range.
void validate(const RegressorSpec& spec);

namespace detail {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> weights;
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct KnnModel {
  std::size_t k_neighbors = 1;
  Matrix x;
  std::vector<double> y;
  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

struct TreeNode {
  // Leaf when feature < 0.
  int feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
  double predict_row(std::span<const double> x) const;
  std::size_t depth() const;
  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

}  // namespace detail

class TrainedModel {
 public:
  using State = std::variant<detail::LinearModel, detail::KnnModel, detail::TreeModel,
                             detail::ForestModel>;

  TrainedModel(RegressorSpec spec, std::size_t input_dim, State state, double y_min, double y_max,
               bool rank_deficient);

  std::size_t input_dim() const noexcept { return input_dim_; }
  const RegressorSpec& spec() const noexcept { return spec_; }
  const State& state() const noexcept { return state_; }
  double train_y_min() const noexcept { return y_min_; }
  double train_y_max() const noexcept { return y_max_; }
  /// OLS/Ridge fell back to the minimum-norm least-squares solution.
  bool rank_deficient() const noexcept { return rank_deficient_; }

  /// Linear models only: intercept followed by weights.
  std::vector<double> coefficients() const;

  double predict_row(std::span<const double> x) const;

  friend bool operator==(const TrainedModel& a, const TrainedModel& b);

 private:
  RegressorSpec spec_;
  std::size_t input_dim_;
  State state_;
  double y_min_;
  double y_max_;
  bool rank_deficient_;
};

/// Throws DataError on shape mismatch or non-finite data, ParameterError on
/// invalid hyperparameters (including n < k_neighbors).
TrainedModel fit(const RegressorSpec& spec, const Matrix& x, std::span<const double> y);

/// One prediction per row of x. Throws DataError when x.cols() != input_dim().
std::vector<double> predict(const TrainedModel& model, const Matrix& x);

}  // namespace xreg
