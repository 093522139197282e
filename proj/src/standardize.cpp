#include "xreg/standardize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xreg/errors.hpp"

namespace xreg {

double FittedMarginTransform::cdf(std::size_t column, double value) const {
  const auto& col = sorted_.at(column);
  const auto count = static_cast<double>(std::upper_bound(col.begin(), col.end(), value) - col.begin());
  return count / static_cast<double>(n_ + 1);
}

double FittedMarginTransform::pareto_scale(std::size_t column, double value) const {
  const auto& col = sorted_.at(column);
  const auto count = static_cast<std::size_t>(std::upper_bound(col.begin(), col.end(), value) - col.begin());
  return static_cast<double>(n_ + 1) / static_cast<double>(n_ + 1 - count);
}

FittedMarginTransform fit_empirical_transform(const Matrix& train_x) {
  if (train_x.rows() == 0 || train_x.cols() == 0) throw DataError("cannot fit margins on an empty matrix");
  if (!train_x.all_finite()) throw DataError("cannot fit margins: non-finite training entries");
  FittedMarginTransform t;
  t.n_ = train_x.rows();
  t.sorted_.reserve(train_x.cols());
  for (std::size_t j = 0; j < train_x.cols(); ++j) {
    auto col = train_x.column(j);
    std::sort(col.begin(), col.end());
    t.sorted_.push_back(std::move(col));
  }
  return t;
}

Matrix apply_empirical_transform(const FittedMarginTransform& t, const Matrix& x) {
  if (x.cols() != t.d()) {
    throw DataError("empirical transform fitted on " + std::to_string(t.d()) +
                    " columns, applied to " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = t.pareto_scale(j, x(i, j));
  }
  return out;
}

Matrix exact_pareto_transform(const Matrix& x, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be > 0");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double v = x(i, j);
      if (!(v >= 1.0)) {
        throw DomainError("exact Pareto transform: entry (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") is below the Pareto support");
      }
      out(i, j) = std::pow(v, alpha);
    }
  }
  return out;
}

std::string Standardization::describe() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::ExactPareto: {
      std::ostringstream os;
      os.precision(17);
      os << "exact:" << alpha;
      return os.str();
    }
    case Kind::EmpiricalRank:
    default: return "empirical";
  }
}

Standardization Standardization::parse(const std::string& text) {
  if (text == "none") return {Kind::None, 1.0};
  if (text == "empirical") return {Kind::EmpiricalRank, 1.0};
  if (text.rfind("exact:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = text.substr(6);
      const double a = std::stod(tail, &used);
      if (used != tail.size() || !(a > 0.0)) throw ParameterError("bad alpha");
      return {Kind::ExactPareto, a};
    } catch (const std::exception&) {
      throw ParameterError("standardization '" + text + "': alpha must be a positive number");
    }
  }
  throw ParameterError("unknown standardization '" + text +
                       "' (expected none, empirical or exact:<alpha>)");
}

Standardizer Standardizer::fit(const Standardization& method, const Matrix& train_x) {
  Standardizer s;
  s.method_ = method;
  if (method.kind == Standardization::Kind::EmpiricalRank) {
    s.margins_ = fit_empirical_transform(train_x);
  } else if (method.kind == Standardization::Kind::ExactPareto && !(method.alpha > 0.0)) {
    throw ParameterError("alpha must be > 0");
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  switch (method_.kind) {
    case Standardization::Kind::EmpiricalRank: return apply_empirical_transform(margins_, x);
    case Standardization::Kind::ExactPareto: return exact_pareto_transform(x, method_.alpha);
    case Standardization::Kind::None:
    default: return x;
  }
}

}  // namespace xreg
