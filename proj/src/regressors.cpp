#include "xreg/regressors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "xreg/errors.hpp"
#include "xreg/kernels.hpp"
#include "xreg/rng.hpp"

namespace xreg {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

std::string depth_text(std::size_t depth) {
  return depth == kUnlimited ? std::string("none") : std::to_string(depth);
}

void validate_tree(const TreeParams& p) {
  if (p.max_depth < 1) throw ParameterError("tree max_depth must be >= 1");
  if (p.min_samples_split < 2) throw ParameterError("tree min_samples_split must be >= 2");
  if (p.min_samples_leaf < 1) throw ParameterError("tree min_samples_leaf must be >= 1");
}

// --- linear models ----------------------------------------------------------

Eigen::MatrixXd to_eigen(const Matrix& x) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      x.data(), static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(x.cols()));
}

TrainedModel fit_ols(const RegressorSpec& spec, const Matrix& x, std::span<const double> y,
                     double y_min, double y_max) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = to_eigen(x);
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);

  // Complete orthogonal decomposition returns the minimum-norm solution when
  // the design is rank deficient.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd coef = cod.solve(target);
  detail::LinearModel lm;
  lm.intercept = coef(0);
  lm.weights.assign(coef.data() + 1, coef.data() + 1 + d);
  return TrainedModel(spec, x.cols(), std::move(lm), y_min, y_max, cod.rank() < d + 1);
}

TrainedModel fit_ridge(const RidgeParams& params, const RegressorSpec& spec, const Matrix& x,
                       std::span<const double> y, double y_min, double y_max) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd xs = to_eigen(x);
  const Eigen::RowVectorXd x_mean = xs.colwise().mean();
  xs.rowwise() -= x_mean;
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);
  const double y_mean = target.mean();

  // Unpenalized intercept: solve the centered problem stacked with sqrt(lambda) I.
  Eigen::MatrixXd stacked(n + d, d);
  stacked.topRows(n) = xs;
  stacked.bottomRows(d) = std::sqrt(params.lambda) * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + d);
  rhs.head(n) = target.array() - y_mean;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(stacked);
  const Eigen::VectorXd w = cod.solve(rhs);
  detail::LinearModel lm;
  lm.weights.assign(w.data(), w.data() + d);
  lm.intercept = y_mean - x_mean.dot(w);
  return TrainedModel(spec, x.cols(), std::move(lm), y_min, y_max, cod.rank() < d);
}

TrainedModel fit_svr(const LinearSvrParams& p, const RegressorSpec& spec, const Matrix& x,
                     std::span<const double> y, double y_min, double y_max) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> w(d, 0.0), grad(d), best_w(d, 0.0);
  double b = 0.0, best_b = 0.0;
  double best_obj = std::numeric_limits<double>::infinity();

  // Objective scaled by 1/n; the minimizer is unchanged.
  const auto objective = [&](std::span<const double> weights, double bias) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - kernels::dot(x.row(i), weights) - bias;
      loss += std::max(0.0, std::fabs(r) - p.epsilon);
    }
    const double wsq = kernels::dot(weights, weights);
    return 0.5 * wsq * inv_n + p.c_reg * loss * inv_n;
  };

  for (std::size_t epoch = 1; epoch <= p.n_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double r = y[i] - kernels::dot(row, w) - b;
      const double excess = std::fabs(r) - p.epsilon;
      if (excess > 0.0) {
        loss += excess;
        const double s = r > 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < d; ++j) grad[j] -= p.c_reg * s * row[j] * inv_n;
        grad_b -= p.c_reg * s * inv_n;
      }
    }
    const double obj = 0.5 * kernels::dot(w, w) * inv_n + p.c_reg * loss * inv_n;
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_b = b;
    }
    for (std::size_t j = 0; j < d; ++j) grad[j] += w[j] * inv_n;
    const double gnorm = std::sqrt(kernels::dot(grad, grad) + grad_b * grad_b);
    if (!(gnorm > 0.0)) break;
    const double step = p.step0 / std::sqrt(static_cast<double>(epoch)) / gnorm;
    for (std::size_t j = 0; j < d; ++j) w[j] -= step * grad[j];
    b -= step * grad_b;
  }
  if (objective(w, b) < best_obj) {
    best_w = w;
    best_b = b;
  }
  detail::LinearModel lm{best_b, std::move(best_w)};
  return TrainedModel(spec, d, std::move(lm), y_min, y_max, false);
}

// --- CART -------------------------------------------------------------------

// Grows one regression tree over a sample of training rows ("slots"; a row
// may appear more than once under bootstrap). Every feature keeps its slots
// in value order; splitting stably partitions those orders, so each level
// costs O(d * m) after the initial sort.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
              const TreeParams& params, std::size_t max_features, Rng* rng)
      : params_(params),
        m_(rows.size()),
        d_(x.cols()),
        max_features_(max_features == 0 || max_features > x.cols() ? x.cols() : max_features),
        rng_(rng),
        y_(m_),
        values_(d_ * m_),
        order_(d_ * m_),
        goes_left_(m_),
        scratch_(m_),
        features_(d_) {
    for (std::size_t s = 0; s < m_; ++s) {
      y_[s] = y[rows[s]];
      for (std::size_t f = 0; f < d_; ++f) values_[f * m_ + s] = x(rows[s], f);
    }
    for (std::size_t f = 0; f < d_; ++f) {
      auto* ord = order_.data() + f * m_;
      const double* vals = values_.data() + f * m_;
      std::iota(ord, ord + m_, std::uint32_t{0});
      std::stable_sort(ord, ord + m_, [vals](std::uint32_t a, std::uint32_t b) { return vals[a] < vals[b]; });
    }
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  detail::TreeModel build() {
    detail::TreeModel tree;
    tree.nodes.emplace_back();
    struct Task {
      std::uint32_t node;
      std::size_t begin, end, depth;
    };
    std::vector<Task> stack{{0, 0, m_, 0}};
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const Split split = find_split(task.begin, task.end, task.depth);
      if (!split.found) {
        tree.nodes[task.node].value = leaf_value(task.begin, task.end);
        continue;
      }
      apply_split(split, task.begin, task.end);
      const auto left = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[task.node];
      node.feature = static_cast<int>(split.feature);
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      const std::size_t mid = task.begin + split.n_left;
      stack.push_back({left + 1, mid, task.end, task.depth + 1});
      stack.push_back({left, task.begin, mid, task.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t n_left = 0;
  };

  const std::uint32_t* order(std::size_t f) const { return order_.data() + f * m_; }
  const double* values(std::size_t f) const { return values_.data() + f * m_; }

  double leaf_value(std::size_t begin, std::size_t end) const {
    const std::uint32_t* ord = order(0);
    double s = 0.0, lo = y_[ord[begin]], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = y_[ord[i]];
      s += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return std::clamp(s / static_cast<double>(end - begin), lo, hi);
  }

  Split find_split(std::size_t begin, std::size_t end, std::size_t depth) {
    Split best;
    const std::size_t count = end - begin;
    if (count < params_.min_samples_split || depth >= params_.max_depth ||
        count < 2 * params_.min_samples_leaf) {
      return best;
    }
    const std::uint32_t* ord0 = order(0);
    double total = 0.0, lo = y_[ord0[begin]], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = y_[ord0[i]];
      total += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) return best;

    const double parent = total * total / static_cast<double>(count);
    double best_proxy = parent + 1e-12 * std::max(1.0, std::fabs(parent));

    if (max_features_ < d_) {
      std::iota(features_.begin(), features_.end(), std::size_t{0});
      for (std::size_t i = 0; i < max_features_; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, d_ - 1);
        std::swap(features_[i], features_[pick(*rng_)]);
      }
    }
    for (std::size_t fi = 0; fi < max_features_; ++fi) {
      const std::size_t f = features_[fi];
      const std::uint32_t* ord = order(f);
      const double* vals = values(f);
      double left_sum = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        left_sum += y_[ord[i]];
        const std::size_t n_left = i - begin + 1;
        const std::size_t n_right = count - n_left;
        if (n_left < params_.min_samples_leaf) continue;
        if (n_right < params_.min_samples_leaf) break;
        const double v = vals[ord[i]];
        const double next = vals[ord[i + 1]];
        if (!(v < next)) continue;
        const double right_sum = total - left_sum;
        const double proxy = left_sum * left_sum / static_cast<double>(n_left) +
                             right_sum * right_sum / static_cast<double>(n_right);
        if (proxy > best_proxy) {
          best_proxy = proxy;
          best.found = true;
          best.feature = f;
          best.n_left = n_left;
          double mid = v + (next - v) / 2.0;
          if (!(mid < next)) mid = v;
          best.threshold = mid;
        }
      }
    }
    return best;
  }

  void apply_split(const Split& split, std::size_t begin, std::size_t end) {
    const double* vals = values(split.feature);
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t s = order(0)[i];
      goes_left_[s] = vals[s] <= split.threshold ? 1 : 0;
    }
    for (std::size_t f = 0; f < d_; ++f) {
      std::uint32_t* ord = order_.data() + f * m_;
      std::size_t l = begin;
      std::size_t r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t s = ord[i];
        if (goes_left_[s]) {
          ord[l++] = s;
        } else {
          scratch_[r++] = s;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), ord + l);
    }
  }

  TreeParams params_;
  std::size_t m_;
  std::size_t d_;
  std::size_t max_features_;
  Rng* rng_;
  std::vector<double> y_;
  std::vector<double> values_;
  std::vector<std::uint32_t> order_;
  std::vector<unsigned char> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::size_t> features_;
};

detail::TreeModel grow_tree(const Matrix& x, std::span<const double> y,
                            std::span<const std::size_t> rows, const TreeParams& params,
                            std::size_t max_features, Rng* rng) {
  TreeBuilder builder(x, y, rows, params, max_features, rng);
  return builder.build();
}

detail::ForestModel grow_forest(const ForestParams& p, const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  detail::ForestModel forest;
  forest.trees.resize(p.n_trees);

  const auto grow_one = [&](std::size_t t) {
    Rng rng = make_rng(split_seed(p.seed, t));
    std::vector<std::size_t> rows(n);
    if (p.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    forest.trees[t] = grow_tree(x, y, rows, p.tree, p.max_features, &rng);
  };

  std::size_t threads = p.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : p.threads;
  threads = std::min(threads, p.n_trees);
  if (threads <= 1) {
    for (std::size_t t = 0; t < p.n_trees; ++t) grow_one(t);
    return forest;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t t = w; t < p.n_trees; t += threads) grow_one(t);
    });
  }
  workers.clear();
  return forest;
}

// --- k-nearest neighbours ---------------------------------------------------

double knn_predict(const detail::KnnModel& m, std::span<const double> query) {
  const std::size_t n = m.x.rows();
  std::vector<double> dist(n);
  kernels::squared_distances(query, m.x.values(), dist);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  const auto k = static_cast<std::ptrdiff_t>(m.k_neighbors);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), closer);
  double s = 0.0, lo = m.y[idx[0]], hi = lo;
  for (std::ptrdiff_t i = 0; i < k; ++i) {
    const double v = m.y[idx[static_cast<std::size_t>(i)]];
    s += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::clamp(s / static_cast<double>(k), lo, hi);
}

}  // namespace

double detail::TreeModel::predict_row(std::span<const double> x) const {
  std::uint32_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& node = nodes[at];
    at = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[at].value;
}

std::size_t detail::TreeModel::depth() const {
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    const auto [at, dpt] = stack.back();
    stack.pop_back();
    best = std::max(best, dpt);
    if (nodes[at].feature >= 0) {
      stack.push_back({nodes[at].left, dpt + 1});
      stack.push_back({nodes[at].right, dpt + 1});
    }
  }
  return best;
}

std::string regressor_name(const RegressorSpec& spec) {
  return std::visit(Overloaded{
                        [](const OlsParams&) { return std::string("ols"); },
                        [](const RidgeParams&) { return std::string("ridge"); },
                        [](const KnnParams&) { return std::string("knn"); },
                        [](const TreeParams&) { return std::string("tree"); },
                        [](const ForestParams&) { return std::string("rf"); },
                        [](const LinearSvrParams&) { return std::string("svr"); },
                    },
                    spec);
}

std::string describe(const RegressorSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  const auto tree_text = [&](const TreeParams& t) {
    os << "max_depth=" << depth_text(t.max_depth) << ";min_samples_split=" << t.min_samples_split
       << ";min_samples_leaf=" << t.min_samples_leaf;
  };
  std::visit(Overloaded{
                 [&](const OlsParams&) { os << "intercept=true"; },
                 [&](const RidgeParams& p) { os << "lambda=" << p.lambda << ";intercept=true"; },
                 [&](const KnnParams& p) { os << "k_neighbors=" << p.k_neighbors << ";metric=euclidean"; },
                 [&](const TreeParams& p) { tree_text(p); },
                 [&](const ForestParams& p) {
                   os << "n_trees=" << p.n_trees << ";max_features="
                      << (p.max_features == 0 ? std::string("all") : std::to_string(p.max_features))
                      << ";bootstrap=" << (p.bootstrap ? "true" : "false") << ";seed=" << p.seed << ";";
                   tree_text(p.tree);
                 },
                 [&](const LinearSvrParams& p) {
                   os << "epsilon=" << p.epsilon << ";c_reg=" << p.c_reg << ";n_epochs=" << p.n_epochs
                      << ";step0=" << p.step0;
                 },
             },
             spec);
  return os.str();
}

void validate(const RegressorSpec& spec) {
  std::visit(Overloaded{
                 [](const OlsParams&) {},
                 [](const RidgeParams& p) {
                   if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
                     throw ParameterError("ridge lambda must be a finite value >= 0");
                   }
                 },
                 [](const KnnParams& p) {
                   if (p.k_neighbors < 1) throw ParameterError("knn k_neighbors must be >= 1");
                 },
                 [](const TreeParams& p) { validate_tree(p); },
                 [](const ForestParams& p) {
                   if (p.n_trees < 1) throw ParameterError("forest n_trees must be >= 1");
                   validate_tree(p.tree);
                 },
                 [](const LinearSvrParams& p) {
                   if (!(p.epsilon >= 0.0)) throw ParameterError("svr epsilon must be >= 0");
                   if (!(p.c_reg > 0.0)) throw ParameterError("svr c_reg must be > 0");
                   if (p.n_epochs < 1) throw ParameterError("svr n_epochs must be >= 1");
                   if (!(p.step0 > 0.0)) throw ParameterError("svr step0 must be > 0");
                 },
             },
             spec);
}

TrainedModel::TrainedModel(RegressorSpec spec, std::size_t input_dim, State state, double y_min,
                           double y_max, bool rank_deficient)
    : spec_(std::move(spec)),
      input_dim_(input_dim),
      state_(std::move(state)),
      y_min_(y_min),
      y_max_(y_max),
      rank_deficient_(rank_deficient) {}

std::vector<double> TrainedModel::coefficients() const {
  const auto* lm = std::get_if<detail::LinearModel>(&state_);
  if (lm == nullptr) throw ParameterError("coefficients: not a linear model");
  std::vector<double> out{lm->intercept};
  out.insert(out.end(), lm->weights.begin(), lm->weights.end());
  return out;
}

double TrainedModel::predict_row(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw DataError("model expects " + std::to_string(input_dim_) + " inputs, got " +
                    std::to_string(x.size()));
  }
  return std::visit(Overloaded{
                        [&](const detail::LinearModel& m) {
                          return m.intercept + kernels::dot(m.weights, x);
                        },
                        [&](const detail::KnnModel& m) { return knn_predict(m, x); },
                        [&](const detail::TreeModel& m) { return m.predict_row(x); },
                        [&](const detail::ForestModel& m) {
                          double s = 0.0;
                          for (const auto& tree : m.trees) s += tree.predict_row(x);
                          return std::clamp(s / static_cast<double>(m.trees.size()), y_min_, y_max_);
                        },
                    },
                    state_);
}

bool operator==(const TrainedModel& a, const TrainedModel& b) {
  return a.spec_ == b.spec_ && a.input_dim_ == b.input_dim_ && a.state_ == b.state_ &&
         a.y_min_ == b.y_min_ && a.y_max_ == b.y_max_ && a.rank_deficient_ == b.rank_deficient_;
}

TrainedModel fit(const RegressorSpec& spec, const Matrix& x, std::span<const double> y) {
  validate(spec);
  if (x.rows() < 1) throw DataError("fit: no training rows");
  if (x.cols() < 1) throw DataError("fit: no input columns");
  if (y.size() != x.rows()) throw DataError("fit: x and y lengths differ");
  if (!x.all_finite() || !std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("fit: non-finite training data");
  }
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double y_min = *lo_it;
  const double y_max = *hi_it;
  const std::size_t n = x.rows();

  return std::visit(
      Overloaded{
          [&](const OlsParams&) { return fit_ols(spec, x, y, y_min, y_max); },
          [&](const RidgeParams& p) { return fit_ridge(p, spec, x, y, y_min, y_max); },
          [&](const KnnParams& p) {
            if (n < p.k_neighbors) {
              throw ParameterError("knn needs at least k_neighbors = " + std::to_string(p.k_neighbors) +
                                   " training rows, got " + std::to_string(n));
            }
            detail::KnnModel m{p.k_neighbors, x, std::vector<double>(y.begin(), y.end())};
            return TrainedModel(spec, x.cols(), std::move(m), y_min, y_max, false);
          },
          [&](const TreeParams& p) {
            std::vector<std::size_t> rows(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            auto tree = grow_tree(x, y, rows, p, x.cols(), nullptr);
            return TrainedModel(spec, x.cols(), std::move(tree), y_min, y_max, false);
          },
          [&](const ForestParams& p) {
            if (p.max_features > x.cols()) {
              throw ParameterError("forest max_features exceeds the input dimension");
            }
            auto forest = grow_forest(p, x, y);
            return TrainedModel(spec, x.cols(), std::move(forest), y_min, y_max, false);
          },
          [&](const LinearSvrParams& p) { return fit_svr(p, spec, x, y, y_min, y_max); },
      },
      spec);
}

std::vector<double> predict(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.input_dim()) {
    throw DataError("predict: model expects " + std::to_string(model.input_dim()) +
                    " columns, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict_row(x.row(i));
  return out;
}

}  // namespace xreg
