#ifndef HDG_ERRORS_HPP
#define HDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hdg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Profiles or histories of mismatched length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A pair of profiles that is not related by (at most) one unilateral deviation,
/// or an argument outside the domain of a partition-set function.
class InvalidPairError : public Error {
 public:
  using Error::Error;
};

/// A pair (a, a') that was required to satisfy a <= a'.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration that would exceed its size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// A coupling cell came out significantly negative, which certifies that the
/// inputs are not an aligned pair driven by a local, monotone rule.
class AlignmentViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hdg

#endif  // HDG_ERRORS_HPP
