#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xreg/errors.hpp"
#include "xreg/regressors.hpp"

using namespace xreg;

namespace {

std::vector<double> linear_response(const Matrix& x, std::mt19937_64& rng, double noise) {
  std::normal_distribution<double> g(0.0, noise);
  std::vector<double> y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    y[i] = 0.3 + g(rng);
    for (std::size_t j = 0; j < x.cols(); ++j) y[i] += (j + 1.0) * x(i, j);
  }
  return y;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::fabs(a[i] - b[i]));
    den = std::max(den, std::fabs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

}  // namespace

TEST_SUITE("regressors") {

TEST_CASE("OLS matches the normal-equation oracle on random designs") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> dims(1, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = dims(rng);
    const std::size_t n = d + 2 + trial;
    const Matrix x = oracle::random_matrix(n, d, rng);
    const auto y = linear_response(x, rng, 0.5);
    const auto model = fit(OlsParams{}, x, y);
    CHECK_FALSE(model.rank_deficient());
    worst = std::max(worst, rel_err(model.coefficients(), oracle::normal_equations(x, y)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("ridge matches the penalized normal equations") {
  std::mt19937_64 rng(32);
  for (double lambda : {0.01, 1.0, 50.0}) {
    const Matrix x = oracle::random_matrix(60, 4, rng);
    const auto y = linear_response(x, rng, 0.2);
    const auto model = fit(RidgeParams{lambda}, x, y);
    CHECK(rel_err(model.coefficients(), oracle::normal_equations(x, y, lambda)) <= 1e-8);
  }
}

TEST_CASE("OLS on a rank-deficient design returns the minimum-norm solution") {
  Matrix x(5, 2);
  std::vector<double> y(5);
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = double(i);
    x(i, 1) = 2.0 * double(i);
    y[i] = 1.0 + 5.0 * double(i);
  }
  const auto model = fit(OlsParams{}, x, y);
  CHECK(model.rank_deficient());
  const auto c = model.coefficients();
  // Fitted values are exact; slopes are the min-norm split of 5 along (1, 2).
  CHECK(c[1] == doctest::Approx(1.0));
  CHECK(c[2] == doctest::Approx(2.0));
  CHECK(model.predict_row(std::vector<double>{4.0, 8.0}) == doctest::Approx(21.0));
}

TEST_CASE("KNN matches the exhaustive-distance oracle exactly") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> dims(1, 6), ks(1, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = dims(rng);
    const std::size_t k = ks(rng);
    const Matrix x = oracle::random_matrix(40 + trial, d, rng);
    std::vector<double> y(x.rows());
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (auto& v : y) v = u(rng);
    const auto model = fit(KnnParams{k}, x, y);
    const Matrix q = oracle::random_matrix(5, d, rng);
    const auto pred = predict(model, q);
    for (std::size_t i = 0; i < q.rows(); ++i) {
      const std::vector<double> row(q.row(i).begin(), q.row(i).end());
      CHECK(pred[i] == oracle::knn_predict(x, y, row, k));
    }
  }
}

TEST_CASE("KNN breaks distance ties by training index") {
  Matrix x(3, 1, std::vector<double>{-1.0, 1.0, 1.0});
  const std::vector<double> y{10.0, 20.0, 30.0};
  const auto model = fit(KnnParams{1}, x, y);
  CHECK(model.predict_row(std::vector<double>{0.0}) == 10.0);
  CHECK_THROWS_AS(fit(KnnParams{4}, x, y), ParameterError);
}

TEST_CASE("unrestricted tree interpolates distinct training points") {
  std::mt19937_64 rng(34);
  const Matrix x = oracle::random_matrix(200, 3, rng);
  std::vector<double> y(200);
  std::normal_distribution<double> g;
  for (auto& v : y) v = g(rng);
  const auto model = fit(TreeParams{}, x, y);
  const auto pred = predict(model, x);
  for (std::size_t i = 0; i < 200; ++i) CHECK(pred[i] == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("tree respects depth and leaf-size limits") {
  std::mt19937_64 rng(35);
  const Matrix x = oracle::random_matrix(300, 2, rng);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = x(i, 0) > 0 ? 1.0 : -1.0;
  const auto stump = fit(TreeParams{1, 2, 1}, x, y);
  const auto& tree = std::get<detail::TreeModel>(stump.state());
  CHECK(tree.depth() == 1);
  CHECK(tree.nodes.front().feature == 0);
  CHECK(std::fabs(tree.nodes.front().threshold) < 0.05);
  CHECK(stump.predict_row(std::vector<double>{0.5, 0.0}) == 1.0);

  const auto coarse = fit(TreeParams{std::numeric_limits<std::size_t>::max(), 2, 40}, x, y);
  const auto& ct = std::get<detail::TreeModel>(coarse.state());
  // Every leaf holds at least 40 of 300 points, so there are at most 7 leaves.
  std::size_t leaves = 0;
  for (const auto& node : ct.nodes) leaves += node.feature < 0;
  CHECK(leaves <= 7);
}

TEST_CASE("constant response gives a single leaf") {
  std::mt19937_64 rng(36);
  const Matrix x = oracle::random_matrix(50, 3, rng);
  const std::vector<double> y(50, 4.2);
  const auto model = fit(TreeParams{}, x, y);
  CHECK(std::get<detail::TreeModel>(model.state()).nodes.size() == 1);
  CHECK(model.predict_row(x.row(0)) == 4.2);
}

TEST_CASE("forest is seed deterministic, thread invariant and within the response range") {
  std::mt19937_64 rng(37);
  const Matrix x = oracle::random_matrix(300, 4, rng);
  const auto y = linear_response(x, rng, 0.3);
  ForestParams p;
  p.n_trees = 25;
  p.seed = 5;
  const auto a = fit(p, x, y);
  const auto b = fit(p, x, y);
  CHECK(a == b);
  p.threads = 3;
  CHECK(fit(p, x, y).state() == a.state());
  p.seed = 6;
  p.threads = 1;
  CHECK_FALSE(fit(p, x, y) == a);
  const Matrix q = oracle::random_matrix(100, 4, rng, -3.0, 3.0);
  for (double v : predict(a, q)) {
    CHECK(v >= a.train_y_min());
    CHECK(v <= a.train_y_max());
  }
}

TEST_CASE("forest without bootstrap and with all features equals a single tree") {
  std::mt19937_64 rng(38);
  const Matrix x = oracle::random_matrix(120, 3, rng);
  const auto y = linear_response(x, rng, 0.3);
  ForestParams p;
  p.n_trees = 4;
  p.bootstrap = false;
  const auto forest = fit(p, x, y);
  const auto tree = fit(TreeParams{}, x, y);
  const Matrix q = oracle::random_matrix(30, 3, rng);
  const auto pf = predict(forest, q), pt = predict(tree, q);
  for (std::size_t i = 0; i < q.rows(); ++i) CHECK(pf[i] == doctest::Approx(pt[i]).epsilon(1e-12));
}

TEST_CASE("linear SVR approaches the least-absolute-deviation fit on clean data") {
  std::mt19937_64 rng(39);
  const Matrix x = oracle::random_matrix(200, 2, rng);
  const auto y = linear_response(x, rng, 0.0);
  LinearSvrParams p;
  p.c_reg = 100.0;
  p.n_epochs = 3000;
  const auto model = fit(p, x, y);
  const auto c = model.coefficients();
  CHECK(c[0] == doctest::Approx(0.3).epsilon(0.05));
  CHECK(c[1] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(c[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("ridge with lambda 0 equals OLS and OLS residuals are orthogonal to the design") {
  std::mt19937_64 rng(40);
  const Matrix x = oracle::random_matrix(50, 3, rng);
  const auto y = linear_response(x, rng, 0.4);
  const auto ols = fit(OlsParams{}, x, y);
  CHECK(rel_err(fit(RidgeParams{0.0}, x, y).coefficients(), ols.coefficients()) <= 1e-8);
  const auto pred = predict(ols, x);
  double scale = 0.0;
  std::vector<double> xtr(4, 0.0);
  for (std::size_t i = 0; i < 50; ++i) {
    const double r = y[i] - pred[i];
    xtr[0] += r;
    for (std::size_t j = 0; j < 3; ++j) xtr[j + 1] += x(i, j) * r;
    scale = std::max(scale, std::fabs(y[i]));
  }
  for (double v : xtr) CHECK(std::fabs(v) <= 1e-8 * scale * 50);
}

TEST_CASE("every learner reproduces a constant response") {
  std::mt19937_64 rng(41);
  const Matrix x = oracle::random_matrix(30, 2, rng);
  const std::vector<double> y(30, -1.25);
  const Matrix q = oracle::random_matrix(10, 2, rng, -4.0, 4.0);
  ForestParams rf;
  rf.n_trees = 5;
  LinearSvrParams svr;
  svr.c_reg = 100.0;
  for (const RegressorSpec& spec : std::vector<RegressorSpec>{OlsParams{}, RidgeParams{}, KnnParams{}, TreeParams{}, rf}) {
    CAPTURE(regressor_name(spec));
    for (double v : predict(fit(spec, x, y), q)) CHECK(v == doctest::Approx(-1.25).epsilon(1e-12));
  }
  for (double v : predict(fit(svr, x, y), q)) CHECK(v == doctest::Approx(-1.25).epsilon(0.02));
}

TEST_CASE("KNN with one neighbour returns the training response at a training point") {
  std::mt19937_64 rng(42);
  const Matrix x = oracle::random_matrix(30, 3, rng);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = double(i) * 0.5;
  const auto model = fit(KnnParams{1}, x, y);
  for (std::size_t i = 0; i < 30; ++i) CHECK(model.predict_row(x.row(i)) == y[i]);
}

TEST_CASE("tree training MSE is non-increasing in max_depth") {
  std::mt19937_64 rng(43);
  const Matrix x = oracle::random_matrix(200, 3, rng);
  auto y = linear_response(x, rng, 0.5);
  double prev = 1e300;
  for (std::size_t depth = 1; depth <= 12; ++depth) {
    const auto model = fit(TreeParams{depth, 2, 1}, x, y);
    const auto pred = predict(model, x);
    double mse = 0.0;
    for (std::size_t i = 0; i < 200; ++i) mse += (pred[i] - y[i]) * (pred[i] - y[i]);
    CHECK(mse <= prev + 1e-12);
    prev = mse;
  }
}

TEST_CASE("one-tree forest without bootstrap reproduces the tree exactly") {
  std::mt19937_64 rng(44);
  const Matrix x = oracle::random_matrix(150, 4, rng);
  const auto y = linear_response(x, rng, 0.3);
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  p.max_features = 4;
  const auto forest = fit(p, x, y);
  const auto tree = fit(TreeParams{}, x, y);
  CHECK(std::get<detail::ForestModel>(forest.state()).trees.front() == std::get<detail::TreeModel>(tree.state()));
  const Matrix q = oracle::random_matrix(40, 4, rng);
  CHECK(predict(forest, q) == predict(tree, q));
}

TEST_CASE("forest prediction is the mean of its trees") {
  std::mt19937_64 rng(45);
  const Matrix x = oracle::random_matrix(100, 2, rng);
  const auto y = linear_response(x, rng, 0.3);
  ForestParams p;
  p.n_trees = 6;
  p.max_features = 1;
  const auto model = fit(p, x, y);
  const auto& forest = std::get<detail::ForestModel>(model.state());
  const Matrix q = oracle::random_matrix(20, 2, rng);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double s = 0.0;
    for (const auto& t : forest.trees) s += t.predict_row(q.row(i));
    CHECK(model.predict_row(q.row(i)) == doctest::Approx(s / 6.0).epsilon(1e-14));
  }
}

TEST_CASE("input validation") {
  Matrix x(3, 2);
  CHECK_THROWS_AS(fit(OlsParams{}, x, std::vector<double>{1.0, 2.0}), DataError);
  Matrix nan(2, 1, std::vector<double>{1.0, std::nan("")});
  CHECK_THROWS_AS(fit(OlsParams{}, nan, std::vector<double>{1.0, 2.0}), DataError);
  const auto model = fit(OlsParams{}, x, std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(predict(model, Matrix(2, 3)), DataError);
  CHECK_THROWS_AS(validate(RidgeParams{-1.0}), ParameterError);
  CHECK_THROWS_AS(validate(KnnParams{0}), ParameterError);
  ForestParams f;
  f.n_trees = 0;
  CHECK_THROWS_AS(validate(f), ParameterError);
  CHECK(regressor_name(ForestParams{}) == "rf");
  CHECK(describe(KnnParams{7}).find("k_neighbors=7") != std::string::npos);
}

TEST_CASE("OLS through three collinear points") {
  Matrix x(3, 1, std::vector<double>{0.0, 1.0, 2.0});
  const auto c = fit(OlsParams{}, x, std::vector<double>{0.0, 1.0, 2.0}).coefficients();
  CHECK(std::fabs(c[0]) <= 1e-10);
  CHECK(std::fabs(c[1] - 1.0) <= 1e-10);
}

}
