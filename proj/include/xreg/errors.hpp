#pragma once

#include <stdexcept>
#include <string>

namespace xreg {

/// Invalid hyperparameter or argument value (k out of range, xi outside (0,1], ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent data: non-finite entries, dimension mismatch, bad CSV cells.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (zero vector, x < 1 for Pareto).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid experiment or model configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while executing a run (a replication threw, an output could not be written).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xreg
