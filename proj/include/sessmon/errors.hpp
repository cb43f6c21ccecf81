// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_ERRORS_HPP_
#define SESSMON_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sessmon {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(std::size_t line, std::size_t col, const std::string& expectation)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + expectation),
        line(line),
        col(col) {}
  std::size_t line;
  std::size_t col;
};

struct NotALattice : Error {
  using Error::Error;
};

struct ForeignLevel : Error {
  using Error::Error;
};

// Syntactic invariant broken (duplicate labels, self-communication, ...).
struct InvariantViolation : Error {
  using Error::Error;
};

struct UndefinedProjection : Error {
  using Error::Error;
};

struct InvalidType : Error {
  using Error::Error;
};

struct IllTyped : Error {
  using Error::Error;
};

struct NoSuchTransition : Error {
  using Error::Error;
};

struct NoSuchBranch : Error {
  using Error::Error;
};

struct EvalError : Error {
  using Error::Error;
};

struct InapplicableStep : Error {
  using Error::Error;
};

struct TraceError : Error {
  using Error::Error;
};

}  // namespace sessmon

#endif  // SESSMON_ERRORS_HPP_
