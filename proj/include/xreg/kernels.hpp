#pragma once

// Data-parallel inner loops shared by geometry, regressors and pipeline.
//
// Every kernel has a scalar reference implementation plus AVX2 (x86-64) and
// NEON (aarch64) variants. The variant is picked once at startup from the
// CPU's capabilities; XREG_ISA=scalar|avx2|neon in the environment overrides
// the choice (unsupported requests fall back to scalar). Variants may differ
// from the scalar path by reassociation of sums only.

#include <cstddef>
#include <span>
#include <string_view>

#include "xreg/norm_kind.hpp"

namespace xreg::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// True when the running CPU (and this build) can execute the given variant.
bool isa_available(Isa isa) noexcept;

/// Variant used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Forces the dispatching entry points onto `isa` (tests and benchmarks).
/// Returns false, leaving the selection unchanged, if it is unavailable.
bool set_active_isa(Isa isa) noexcept;

struct KernelTable {
  /// out[r] = ||row r|| for a rows x cols row-major block.
  void (*row_norms)(const double* data, std::size_t rows, std::size_t cols, NormKind kind,
                    double* out);
  /// out[r] = sum_j (data[r, j] - query[j])^2.
  void (*squared_distances)(const double* query, const double* data, std::size_t rows,
                            std::size_t cols, double* out);
  /// sum_i (a[i] - b[i])^2.
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
  /// sum_i a[i] * b[i].
  double (*dot)(const double* a, const double* b, std::size_t n);
};

/// Kernel table for a specific variant. Calling an unavailable variant is undefined.
const KernelTable& table(Isa isa) noexcept;

void row_norms(std::span<const double> data, std::size_t cols, NormKind kind,
               std::span<double> out);
void squared_distances(std::span<const double> query, std::span<const double> data,
                       std::span<double> out);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

namespace detail {
extern const KernelTable scalar_table;
#if defined(XREG_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(XREG_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace xreg::kernels
