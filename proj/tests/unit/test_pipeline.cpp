#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "xreg/errors.hpp"
#include "xreg/geometry.hpp"
#include "xreg/io.hpp"
#include "xreg/pipeline.hpp"
#include "xreg/rng.hpp"

using namespace xreg;

namespace {

ExperimentConfig small_config() {
  SimulatedSource src;
  src.model.kind = sim::ModelKind::Additive;
  src.model.d = 3;
  src.n_train = 800;
  src.n_test = 2000;
  ExperimentConfig cfg;
  cfg.source = src;
  ForestParams rf;
  rf.n_trees = 10;
  cfg.regressors = {OlsParams{}, KnnParams{}, rf};
  cfg.replications = 4;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("k rules") {
  KRule sqrt_rule;
  CHECK(sqrt_rule.resolve(10000) == 100);
  CHECK(sqrt_rule.resolve(99) == 9);
  const auto frac = KRule::parse("fraction:0.1");
  CHECK(frac.resolve(751) == 75);
  CHECK(KRule::parse("fixed:25").resolve(100) == 25);
  CHECK_THROWS_AS(KRule::parse("fixed:25").resolve(20), ParameterError);
  CHECK_THROWS_AS(KRule::parse("fraction:0.001").resolve(100), ParameterError);
  CHECK_THROWS_AS(KRule::parse("fraction:2"), ParameterError);
  CHECK_THROWS_AS(KRule::parse("top"), ParameterError);
  for (const auto* text : {"sqrt", "fraction:0.25", "fixed:7"}) CHECK(KRule::parse(KRule::parse(text).describe()) == KRule::parse(text));
}

TEST_CASE("regime names") {
  for (Regime r : {Regime::FullX, Regime::ExtremeX, Regime::AngularExtreme}) {
    CHECK(parse_regime(to_string(r)) == r);
  }
  CHECK(parse_regime("angular") == Regime::AngularExtreme);
  CHECK_THROWS_AS(parse_regime("tail"), ParameterError);
}

TEST_CASE("algorithm 1 fits on the angles of the k largest standardized points") {
  sim::SimModelConfig model;
  model.d = 3;
  model.beta = std::vector<double>{0.2, 0.5, 0.9};
  model.seed = 41;
  const Dataset train = sim::simulate(3000, model);
  const auto fitted = run_algorithm1(train, 54, OlsParams{}, NormKind::L2, Standardization{});
  REQUIRE(fitted.extremes.indices.size() == 54);
  const Matrix v = fitted.standardizer.apply(train.x);
  const auto expect = select_extremes(v, 54);
  CHECK(fitted.extremes.indices == expect.indices);
  std::vector<double> y;
  for (auto i : expect.indices) y.push_back(train.y[i]);
  const auto direct = fit(OlsParams{}, expect.angles, y);
  CHECK(fitted.model == direct);
  const auto pred = predict_angular(fitted, train.x.select_rows(expect.indices));
  const auto pred_direct = predict(direct, expect.angles);
  for (std::size_t i = 0; i < pred.size(); ++i) CHECK(pred[i] == pred_direct[i]);
}

TEST_CASE("angular predictions are invariant to radial scaling on the standardized scale") {
  sim::SimModelConfig model;
  model.d = 2;
  model.beta = std::vector<double>{0.3, 0.7};
  model.seed = 42;
  const Dataset train = sim::simulate(500, model);
  Standardization none{Standardization::Kind::None};
  const auto fitted = run_algorithm1(train, 40, KnnParams{3}, NormKind::L2, none);
  Matrix scaled = train.x;
  for (auto& v : scaled.values()) v *= 13.0;
  const auto a = predict_angular(fitted, train.x), b = predict_angular(fitted, scaled);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("extreme MSE equals an explicit loop over the selected test points") {
  sim::SimModelConfig model;
  model.d = 2;
  model.beta = std::vector<double>{0.3, 0.7};
  model.seed = 43;
  const Dataset train = sim::simulate(1000, model);
  model.seed = 44;
  const Dataset test = sim::simulate(4000, model);
  const auto st = Standardizer::fit(Standardization{}, train.x);
  const auto m = train_regime(Regime::AngularExtreme, OlsParams{}, train, st, 31, NormKind::L2);
  const auto ext = prepare_extreme_test(st, test, 63, NormKind::L2);
  const Matrix v = st.apply(test.x);
  const auto sel = select_extremes(v, 63);
  CHECK(ext.indices == sel.indices);
  double acc = 0.0;
  for (std::size_t i = 0; i < 63; ++i) {
    const double e = m.predict_row(sel.angles.row(i)) - test.y[sel.indices[i]];
    acc += e * e;
  }
  CHECK(extreme_mse(m, ext, Regime::AngularExtreme) == doctest::Approx(acc / 63).epsilon(1e-13));
  CHECK(evaluate_extreme_mse(m, st, test, 63, Regime::AngularExtreme, NormKind::L2) ==
        extreme_mse(m, ext, Regime::AngularExtreme));

  const auto raw = train_regime(Regime::ExtremeX, OlsParams{}, train, st, 31, NormKind::L2);
  double acc_raw = 0.0;
  for (std::size_t i = 0; i < 63; ++i) {
    const double e = raw.predict_row(test.x.row(sel.indices[i])) - test.y[sel.indices[i]];
    acc_raw += e * e;
  }
  CHECK(extreme_mse(raw, ext, Regime::ExtremeX) == doctest::Approx(acc_raw / 63).epsilon(1e-13));
}

TEST_CASE("split_dataset partitions the rows") {
  std::mt19937_64 rng(45);
  Dataset d{oracle::random_matrix(30, 2, rng), std::vector<double>(30)};
  for (std::size_t i = 0; i < 30; ++i) d.y[i] = double(i);
  const auto [train, test] = split_dataset(d, 1.0 / 3.0, 9);
  CHECK(test.n() == 10);
  CHECK(train.n() == 20);
  std::set<double> seen(train.y.begin(), train.y.end());
  seen.insert(test.y.begin(), test.y.end());
  CHECK(seen.size() == 30);
  CHECK(std::is_sorted(train.y.begin(), train.y.end()));
  const auto again = split_dataset(d, 1.0 / 3.0, 9);
  CHECK(again.first == train);
  CHECK_THROWS_AS(split_dataset(d, 0.01, 9), ParameterError);
}

TEST_CASE("run_comparison is deterministic and independent of the thread count") {
  auto cfg = small_config();
  const auto a = run_comparison(cfg);
  const auto b = run_comparison(cfg);
  cfg.threads = 3;
  const auto c = run_comparison(cfg);
  REQUIRE(a.rows.size() == 9);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].per_replication == b.rows[i].per_replication);
    CHECK(a.rows[i].per_replication == c.rows[i].per_replication);
    CHECK(a.rows[i].k_train == 28);
    CHECK(a.rows[i].k_test == 44);
    CHECK(a.rows[i].mean_mse_vs_truth.has_value());
  }
  REQUIRE(a.replications.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(a.replications[r].seed == replication_seed(3, r));
    CHECK(a.replications[r].beta.size() == 3);
  }
  CHECK(a.replications[0].beta != a.replications[1].beta);
}

TEST_CASE("report rows carry sample statistics of the per-replication MSE") {
  const auto report = run_comparison(small_config());
  for (const auto& row : report.rows) {
    const auto& v = row.per_replication;
    double m = 0.0;
    for (double e : v) m += e;
    m /= v.size();
    double ss = 0.0;
    for (double e : v) ss += (e - m) * (e - m);
    CHECK(row.mean_mse == doctest::Approx(m).epsilon(1e-13));
    CHECK(row.std_mse == doctest::Approx(std::sqrt(ss / (v.size() - 1))).epsilon(1e-12));
    CHECK(row.standard_error() == doctest::Approx(row.std_mse / 2.0));
  }
  CHECK(report.find("knn", Regime::ExtremeX) != nullptr);
  CHECK(report.find("svr", Regime::ExtremeX) == nullptr);
}

TEST_CASE("duplicate regressors get distinct labels") {
  const auto labels = regressor_labels({OlsParams{}, RidgeParams{0.1}, RidgeParams{10.0}, OlsParams{}});
  CHECK(labels == std::vector<std::string>{"ols", "ridge", "ridge#2", "ols#2"});
}

TEST_CASE("csv source runs through a random split") {
  const auto dir = std::filesystem::temp_directory_path() / "xreg_pipeline_csv";
  std::filesystem::create_directories(dir);
  sim::SimModelConfig model;
  model.d = 2;
  model.beta = std::vector<double>{0.4, 0.6};
  model.seed = 46;
  io::write_dataset_csv(sim::simulate(900, model), dir / "d.csv");
  ExperimentConfig cfg;
  CsvSource src;
  src.path = (dir / "d.csv").string();
  src.target = "y";
  cfg.source = src;
  cfg.regressors = {OlsParams{}};
  cfg.replications = 3;
  const auto report = run_comparison(cfg);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].k_train == 24);  // floor(sqrt(600))
  CHECK(report.rows[0].k_test == 17);   // floor(sqrt(300))
  CHECK_FALSE(report.rows[0].mean_mse_vs_truth.has_value());
  CHECK(report.replications[0].n_train == 600);
}

TEST_CASE("config validation names the key") {
  ExperimentConfig cfg;
  try {
    cfg.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("data.source") != std::string::npos);
  }
  auto small = small_config();
  small.k_rule = KRule::parse("fixed:5000");
  CHECK_THROWS_AS(small.validate(), ConfigError);
  small = small_config();
  small.replications = 0;
  CHECK_THROWS_AS(small.validate(), ConfigError);
}

TEST_CASE("full selection without standardization is OLS on all angles") {
  sim::SimModelConfig model;
  model.d = 3;
  model.beta = std::vector<double>{0.2, 0.5, 0.9};
  model.seed = 47;
  const Dataset train = sim::simulate(400, model);
  const auto fitted = run_algorithm1(train, 400, OlsParams{}, NormKind::L2, Standardization{Standardization::Kind::None});
  const auto direct = fit(OlsParams{}, angles(train.x), train.y);
  const auto a = fitted.model.coefficients(), b = direct.coefficients();
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-10));
}

TEST_CASE("noiseless unit-Pareto margins: mean OLS-on-angles coefficients over seeds approach beta = (1, 0)") {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  for (int r = 0; r < 10; ++r) {
    sim::SimModelConfig model;
    model.d = 2;
    model.alpha = 1.0;
    model.beta = std::vector<double>{1.0, 0.0};
    model.zero_additive_noise = true;
    model.seed = 48 + r;
    const Dataset train = sim::simulate(5000, model);
    const auto c = run_algorithm1(train, 70, OlsParams{}, NormKind::L2, Standardization{}).model.coefficients();
    c0 += c[0] / 10.0;
    c1 += c[1] / 10.0;
    c2 += c[2] / 10.0;
  }
  CHECK(std::fabs(c0) <= 0.05);
  CHECK(std::fabs(c1 - 1.0) <= 0.05);
  CHECK(std::fabs(c2) <= 0.05);
}

TEST_CASE("perfect and constant models score zero") {
  sim::SimModelConfig model;
  model.d = 2;
  model.beta = std::vector<double>{0.5, 0.5};
  model.seed = 49;
  Dataset train = sim::simulate(300, model);
  Dataset test = sim::simulate(300, model);
  const auto st = Standardizer::fit(Standardization{}, train.x);
  // Responses that are an exact linear function of the angles: OLS on angles is perfect.
  const auto set_linear = [&](Dataset& d) {
    const Matrix a = angles(st.apply(d.x));
    for (std::size_t i = 0; i < d.n(); ++i) d.y[i] = 0.25 + 2.0 * a(i, 0) - a(i, 1);
  };
  set_linear(train);
  set_linear(test);
  const auto m = train_regime(Regime::AngularExtreme, OlsParams{}, train, st, 50, NormKind::L2);
  CHECK(evaluate_extreme_mse(m, st, test, 40, Regime::AngularExtreme, NormKind::L2) <= 1e-20);
  std::fill(train.y.begin(), train.y.end(), 3.0);
  std::fill(test.y.begin(), test.y.end(), 3.0);
  const auto c = train_regime(Regime::ExtremeX, TreeParams{}, train, st, 50, NormKind::L2);
  CHECK(evaluate_extreme_mse(c, st, test, 40, Regime::ExtremeX, NormKind::L2) == 0.0);
}

TEST_CASE("single replication reruns exactly") {
  auto cfg = small_config();
  cfg.replications = 1;
  const auto a = run_comparison(cfg);
  const auto b = run_comparison(cfg);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].mean_mse == b.rows[i].mean_mse);
}

TEST_CASE("split of nine rows at one third") {
  Dataset d{Matrix(9, 1), std::vector<double>(9)};
  for (std::size_t i = 0; i < 9; ++i) d.y[i] = double(i);
  const auto [train, test] = split_dataset(d, 1.0 / 3.0, 1);
  CHECK(test.n() == 3);
  CHECK(train.n() == 6);
}

TEST_CASE("baselines never see angles and the angular regime never sees magnitudes") {
  sim::SimModelConfig model;
  model.d = 2;
  model.beta = std::vector<double>{0.5, 0.5};
  model.seed = 50;
  const Dataset train = sim::simulate(1000, model);
  const Dataset test = sim::simulate(1000, model);
  const auto st = Standardizer::fit(Standardization{}, train.x);
  const auto ext = prepare_extreme_test(st, test, 30, NormKind::L2);
  const auto ang = train_regime(Regime::AngularExtreme, OlsParams{}, train, st, 30, NormKind::L2);
  // Rescaling the standardized test inputs changes nothing for the angular model.
  ExtremeTestSet scaled = ext;
  for (auto& v : scaled.standardized.values()) v *= 9.0;
  for (auto& v : scaled.raw.values()) v *= 9.0;
  CHECK(extreme_mse(ang, scaled, Regime::AngularExtreme) == extreme_mse(ang, ext, Regime::AngularExtreme));
  // Replacing the angles changes nothing for a raw-scale baseline.
  const auto raw = train_regime(Regime::ExtremeX, OlsParams{}, train, st, 30, NormKind::L2);
  ExtremeTestSet scrambled = ext;
  for (auto& v : scrambled.angles.values()) v = 0.0;
  CHECK(extreme_mse(raw, scrambled, Regime::ExtremeX) == extreme_mse(raw, ext, Regime::ExtremeX));
}

TEST_CASE("bias-variance U shape over k at fixed n") {
  const std::vector<std::size_t> ks{25, 50, 100, 200, 400, 800};
  std::vector<double> mse(ks.size(), 0.0);
  for (int r = 0; r < 10; ++r) {
    Rng rng = make_rng(replication_seed(51, r));
    sim::SimModelConfig cfg;
    cfg.d = 10;
    cfg.sigma = 0.1;
    cfg.beta = sim::draw_uniform_beta(10, rng);
    const Dataset train = sim::generate(100000, cfg, rng);
    const Dataset test = sim::generate(100000, cfg, rng);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto fitted = run_algorithm1(train, ks[i], OlsParams{}, NormKind::L2, Standardization{});
      mse[i] += evaluate_extreme_mse(fitted.model, fitted.standardizer, test, 316, Regime::AngularExtreme, NormKind::L2);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(mse.begin(), mse.end()) - mse.begin());
  CAPTURE(best);
  CHECK(best > 0);
  CHECK(best + 1 < ks.size());
}

}

TEST_SUITE("pipeline_recovery") {

TEST_CASE("noiseless additive model: OLS on angles recovers beta = (1, 0)") {
  sim::SimModelConfig model;
  model.d = 2;
  model.beta = std::vector<double>{1.0, 0.0};
  model.zero_additive_noise = true;
  model.seed = 48;
  const Dataset train = sim::simulate(5000, model);
  const auto fitted = run_algorithm1(train, 70, OlsParams{}, NormKind::L2, Standardization{});
  const auto c = fitted.model.coefficients();
  CAPTURE(c[0]);
  CAPTURE(c[1]);
  CAPTURE(c[2]);
  CHECK(std::fabs(c[0]) <= 0.05);
  CHECK(std::fabs(c[1] - 1.0) <= 0.05);
  CHECK(std::fabs(c[2]) <= 0.05);
  CHECK(run_algorithm1(train, 70, OlsParams{}, NormKind::L2, Standardization{}).model == fitted.model);
}

}
