#include <atomic>
#include <cstdlib>
#include <string>

#include "xreg/errors.hpp"
#include "xreg/kernels.hpp"

namespace xreg::kernels {
namespace {

Isa detect_best() noexcept {
#if defined(XREG_HAVE_AVX2)
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
#endif
#if defined(XREG_HAVE_NEON)
  if (isa_available(Isa::Neon)) return Isa::Neon;
#endif
  return Isa::Scalar;
}

Isa initial_isa() noexcept {
  const char* env = std::getenv("XREG_ISA");
  if (env != nullptr) {
    const std::string requested(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (requested == to_string(isa)) return isa_available(isa) ? isa : Isa::Scalar;
    }
  }
  return detect_best();
}

std::atomic<Isa>& selected() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DataError(std::string(what) + ": length mismatch");
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    case Isa::Scalar:
    default: return "scalar";
  }
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(XREG_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(XREG_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) noexcept {
  if (!isa_available(isa)) return false;
  selected().store(isa, std::memory_order_relaxed);
  return true;
}

const KernelTable& table(Isa isa) noexcept {
  switch (isa) {
#if defined(XREG_HAVE_AVX2)
    case Isa::Avx2: return detail::avx2_table;
#endif
#if defined(XREG_HAVE_NEON)
    case Isa::Neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

void row_norms(std::span<const double> data, std::size_t cols, NormKind kind,
               std::span<double> out) {
  if (cols == 0) throw DataError("row_norms: zero columns");
  if (data.size() % cols != 0) throw DataError("row_norms: data is not a whole number of rows");
  require_same_size(data.size() / cols, out.size(), "row_norms");
  table(active_isa()).row_norms(data.data(), out.size(), cols, kind, out.data());
}

void squared_distances(std::span<const double> query, std::span<const double> data,
                       std::span<double> out) {
  const std::size_t cols = query.size();
  if (cols == 0) throw DataError("squared_distances: empty query");
  require_same_size(data.size(), out.size() * cols, "squared_distances");
  table(active_isa()).squared_distances(query.data(), data.data(), out.size(), cols, out.data());
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "sum_squared_diff");
  return table(active_isa()).sum_squared_diff(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return table(active_isa()).dot(a.data(), b.data(), a.size());
}

}  // namespace xreg::kernels
