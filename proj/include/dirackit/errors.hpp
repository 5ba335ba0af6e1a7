#pragma once

#include <stdexcept>
#include <string>

namespace dk {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: syntax errors, unknown identifiers, bad shapes.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Fields that live on different charts were combined.
class ChartMismatch : public InputError {
 public:
  using InputError::InputError;
};

/// Operands whose dimensions do not fit together.
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// A sampled constant-rank hypothesis failed (rank jump, degenerate form,
/// singular elimination block).
class RankError : public Error {
 public:
  explicit RankError(const std::string& stage, const std::string& what)
      : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// A jet was asked for a derivative order it does not carry.
class OrderError : public Error {
 public:
  using Error::Error;
};

}  // namespace dk
