#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace af {

// All library failures derive from Error so callers (notably the CLI runner)
// can map them onto exit codes with a single catch ladder.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidFieldError : public Error {
public:
  using Error::Error;
};

class GridMismatchError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class AlignmentError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class InternalError : public Error {
public:
  using Error::Error;
};

class NonFiniteError : public Error {
public:
  NonFiniteError(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

private:
  std::size_t node_;
};

class SolverFailure : public Error {
public:
  SolverFailure(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

}  // namespace af
