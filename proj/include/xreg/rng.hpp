#pragma once

#include <cstdint>
#include <random>

namespace xreg {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a master seed and a stream index
/// (replication, tree, ...). SplitMix64 finalizer over master ^ golden * (index + 1).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace xreg
