#pragma once

#include <stdexcept>
#include <string>

namespace scd {

/// Caller broke a documented precondition (wrong vector length, empty profile, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data could not be read or is not what it claims to be.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic is undefined for the given input (zero variance, empty row).
class UndefinedStatistic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bad configuration or command-line parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scd
