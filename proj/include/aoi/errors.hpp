#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Invalid configuration: bad distribution, price set, preset name, file syntax.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A formula evaluated outside its domain (e.g. beta < 0, N < 2, lambda >= mu_sum).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// No epsilon > 0 satisfies the stability slack condition.
class InfeasibleError : public DomainError {
 public:
  explicit InfeasibleError(const std::string& what) : DomainError(what) {}
};

// Output could not be written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aoi
