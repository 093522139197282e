#include "xreg/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xreg/dataset.hpp"
#include "xreg/errors.hpp"

namespace xreg {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DataError("Matrix: buffer holds " + std::to_string(data_.size()) + " values, expected " +
                    std::to_string(rows_ * cols_));
  }
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Dataset::validate() const {
  if (x.rows() == 0) throw DataError("dataset has no rows");
  if (x.cols() == 0) throw DataError("dataset has no feature columns");
  if (y.size() != x.rows()) {
    throw DataError("dataset has " + std::to_string(x.rows()) + " input rows but " +
                    std::to_string(y.size()) + " responses");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(r, c))) {
        throw DataError("non-finite input at row " + std::to_string(r) + ", column " +
                        std::to_string(c));
      }
    }
    if (!std::isfinite(y[r])) throw DataError("non-finite response at row " + std::to_string(r));
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out{x.select_rows(indices), {}};
  out.y.reserve(indices.size());
  for (auto i : indices) out.y.push_back(y[i]);
  return out;
}

}  // namespace xreg
