#pragma once

#include <stdexcept>
#include <string>

namespace qod {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
  using Error::Error;
};

/// Requested packet is too narrow for the grid. Callers may catch this and
/// proceed with a coarser width.
class ResolutionWarning : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// NaN/Inf appeared in a state, or a calibration could not be trusted.
class NumericalError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace qod
