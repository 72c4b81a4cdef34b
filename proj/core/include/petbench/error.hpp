#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace petbench {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class StratificationError : public Error {
 public:
  using Error::Error;
};

class HierarchyError : public Error {
 public:
  using Error::Error;
};

/// A raw value appears twice in a hierarchy file with different generalizations.
class ConsistencyError : public HierarchyError {
 public:
  using HierarchyError::HierarchyError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// No lattice node satisfies k-anonymity within the suppression limit.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ProbeError : public Error {
 public:
  using Error::Error;
};

class ProbeUnavailableError : public ProbeError {
 public:
  using ProbeError::ProbeError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

}  // namespace petbench
