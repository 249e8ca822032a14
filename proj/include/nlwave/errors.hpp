#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nlwave {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public Error {
public:
  using Error::Error;
};

/// A quadrature rule has fewer points than the basis needs.
class RuleTooCoarse : public Error {
public:
  using Error::Error;
};

/// The Gaussian never reaches the requested threshold.
class NoTruncation : public Error {
public:
  using Error::Error;
};

class SingularSystem : public Error {
public:
  using Error::Error;
};

/// A requested snapshot time does not fall on a time step.
class MisalignedSnapshot : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

class CflViolation : public Error {
public:
  using Error::Error;
};

/// Invalid user configuration; `field()` names the offending entry.
class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace nlwave
