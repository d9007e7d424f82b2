#pragma once

#include <stdexcept>
#include <string>

namespace ldhoo {

/// Tree shape violated, e.g. splitting a cell that already has children.
class StructuralError : public std::logic_error {
 public:
  explicit StructuralError(const std::string& what) : std::logic_error(what) {}
};

/// Caller misuse: invalid configuration, calling out of order, empty input.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Data outside its contract, e.g. a reward outside [0, 1].
class DataError : public std::domain_error {
 public:
  explicit DataError(const std::string& what) : std::domain_error(what) {}
};

/// Non-finite state produced or consumed by an environment integrator.
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal bookkeeping produced a value outside its provable range.
class AccountingError : public std::logic_error {
 public:
  explicit AccountingError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ldhoo
