#include <doctest.h>

#include <cmath>
#include <random>

#include "xreg/stats.hpp"

using namespace xreg;

TEST_SUITE("stats") {

TEST_CASE("running stats match two-pass formulas and merge exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(5.0, 2.0);
  std::vector<double> v(1001);
  for (auto& e : v) e = g(rng);
  RunningStats all, left, right;
  for (std::size_t i = 0; i < v.size(); ++i) {
    all.push(v[i]);
    (i < 400 ? left : right).push(v[i]);
  }
  long double m = 0;
  for (double e : v) m += e;
  m /= v.size();
  long double ss = 0;
  for (double e : v) ss += (e - m) * (e - m);
  const double var = static_cast<double>(ss / (v.size() - 1));
  CHECK(all.mean() == doctest::Approx(static_cast<double>(m)).epsilon(1e-13));
  CHECK(all.sample_variance() == doctest::Approx(var).epsilon(1e-12));
  CHECK(sample_variance(v) == doctest::Approx(var).epsilon(1e-12));
  left.merge(right);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
  CHECK(left.sample_variance() == doctest::Approx(all.sample_variance()).epsilon(1e-12));
  CHECK(all.standard_error() == doctest::Approx(std::sqrt(var / v.size())).epsilon(1e-12));
}

TEST_CASE("degenerate running stats") {
  RunningStats s;
  CHECK(s.sample_variance() == 0.0);
  s.push(2.0);
  CHECK(s.sample_variance() == 0.0);
  RunningStats empty;
  s.merge(empty);
  CHECK(s.count() == 1);
  empty.merge(s);
  CHECK(empty.mean() == 2.0);
}

TEST_CASE("pearson correlation") {
  std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1}, k{1, 1, 1, 1};
  CHECK(pearson_correlation(a, b) == doctest::Approx(1.0));
  CHECK(pearson_correlation(a, c) == doctest::Approx(-1.0));
  CHECK(pearson_correlation(a, k) == 0.0);
}

TEST_CASE("ks distance against brute-force evaluation on the pooled sample") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<double> a(57), b(91);
  for (auto& e : a) e = g(rng);
  for (auto& e : b) e = g(rng) + 0.3;
  double want = 0.0;
  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  for (double t : pool) {
    double fa = 0, fb = 0;
    for (double e : a) fa += e <= t;
    for (double e : b) fb += e <= t;
    want = std::max(want, std::fabs(fa / a.size() - fb / b.size()));
  }
  CHECK(ks_distance(a, b) == doctest::Approx(want).epsilon(1e-15));
  CHECK(ks_distance(a, a) == 0.0);
  std::vector<double> ties{1, 1, 2, 2}, ties2{1, 2, 2, 2};
  CHECK(ks_distance(ties, ties2) == doctest::Approx(0.25));
}

TEST_CASE("least-squares slope") {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(-0.7 * v + 3.0);
  CHECK(ls_slope(x, y) == doctest::Approx(-0.7));
}

}
