#pragma once

#include <stdexcept>
#include <string>

namespace relctl {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration: bad flag values, missing files named in a config,
/// inconsistent parameters. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Invalid or degenerate data: unparseable rows, single-class windows,
/// empty inputs. Maps to CLI exit code 3.
class DataError : public Error {
public:
  using Error::Error;
};

/// An internal invariant was violated. Maps to CLI exit code 4.
class InvariantError : public Error {
public:
  using Error::Error;
};

} // namespace relctl
