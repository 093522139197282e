#pragma once

#include <string>
#include <string_view>

namespace xreg {

enum class NormKind { L1, L2, Linf };

std::string_view to_string(NormKind kind) noexcept;

/// Accepts "l1", "l2", "linf" (case-insensitive). Throws ParameterError otherwise.
NormKind parse_norm_kind(std::string_view text);

}  // namespace xreg
