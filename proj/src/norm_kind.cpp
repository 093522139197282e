#include "xreg/norm_kind.hpp"

#include <algorithm>
#include <cctype>

#include "xreg/errors.hpp"

namespace xreg {

std::string_view to_string(NormKind kind) noexcept {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::Linf: return "linf";
    case NormKind::L2:
    default: return "l2";
  }
}

NormKind parse_norm_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "l1") return NormKind::L1;
  if (lower == "l2") return NormKind::L2;
  if (lower == "linf") return NormKind::Linf;
  throw ParameterError("unknown norm '" + std::string(text) + "' (expected l1, l2 or linf)");
}

}  // namespace xreg
