#pragma once

#include <span>
#include <vector>

#include "xreg/matrix.hpp"

namespace xreg {

/// n x d inputs paired with n responses.
struct Dataset {
  Matrix x;
  std::vector<double> y;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t d() const noexcept { return x.cols(); }

  /// Throws DataError unless n >= 1, sizes agree and every entry is finite.
  void validate() const;

  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace xreg
