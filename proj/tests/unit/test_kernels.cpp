#include <doctest.h>

#include <cmath>
#include <random>

#include "xreg/errors.hpp"
#include "xreg/kernels.hpp"

using namespace xreg;
using kernels::Isa;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& e : v) e = g(rng);
  return v;
}

void close(double a, double b) {
  CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)));
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (kernels::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels agree with direct loops") {
  std::mt19937_64 rng(1);
  const auto& t = kernels::table(Isa::Scalar);
  for (std::size_t n : {0u, 1u, 3u, 7u, 8u, 17u}) {
    const auto a = random_vec(n, rng), b = random_vec(n, rng);
    double dot = 0, ssd = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      ssd += (a[i] - b[i]) * (a[i] - b[i]);
    }
    close(t.dot(a.data(), b.data(), n), dot);
    close(t.sum_squared_diff(a.data(), b.data(), n), ssd);
  }
}

TEST_CASE("vector kernels match the scalar reference") {
  const auto isas = vector_isas();
  if (isas.empty()) {
    MESSAGE("no vector ISA on this host; equivalence checks skipped");
    return;
  }
  std::mt19937_64 rng(2);
  const auto& ref = kernels::table(Isa::Scalar);
  for (Isa isa : isas) {
    CAPTURE(kernels::to_string(isa));
    const auto& t = kernels::table(isa);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = random_vec(n, rng), b = random_vec(n, rng);
      close(t.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n));
      close(t.sum_squared_diff(a.data(), b.data(), n), ref.sum_squared_diff(a.data(), b.data(), n));
    }
    for (std::size_t cols : {1u, 2u, 3u, 4u, 5u, 8u, 10u, 16u, 19u}) {
      const std::size_t rows = 37;
      const auto data = random_vec(rows * cols, rng);
      const auto q = random_vec(cols, rng);
      for (NormKind kind : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
        std::vector<double> got(rows), want(rows);
        t.row_norms(data.data(), rows, cols, kind, got.data());
        ref.row_norms(data.data(), rows, cols, kind, want.data());
        for (std::size_t i = 0; i < rows; ++i) {
          if (kind == NormKind::Linf) CHECK(got[i] == want[i]);
          else close(got[i], want[i]);
        }
      }
      std::vector<double> got(rows), want(rows);
      t.squared_distances(q.data(), data.data(), rows, cols, got.data());
      ref.squared_distances(q.data(), data.data(), rows, cols, want.data());
      for (std::size_t i = 0; i < rows; ++i) close(got[i], want[i]);
    }
  }
}

TEST_CASE("active ISA can be switched and restored") {
  const Isa before = kernels::active_isa();
  CHECK(kernels::set_active_isa(Isa::Scalar));
  CHECK(kernels::active_isa() == Isa::Scalar);
  CHECK(kernels::set_active_isa(before));
  CHECK(kernels::active_isa() == before);
  CHECK(kernels::isa_available(Isa::Scalar));
}

TEST_CASE("span wrappers reject mismatched lengths") {
  std::vector<double> a(3), b(4), out(2);
  CHECK_THROWS_AS(kernels::dot(a, b), DataError);
  CHECK_THROWS_AS(kernels::sum_squared_diff(a, b), DataError);
  CHECK_THROWS_AS(kernels::row_norms(b, 3, NormKind::L2, out), DataError);
}

}
