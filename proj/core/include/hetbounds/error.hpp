#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hetbounds {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad interval, unknown label, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The expanded design matrix does not have full column rank.
class RankDeficientError : public Error {
 public:
  RankDeficientError(std::string message, std::vector<std::string> columns)
      : Error(std::move(message)), columns_(std::move(columns)) {}

  /// Design columns judged linearly dependent on the others.
  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

/// An operation that needs a nonempty polytope was given an empty one.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetbounds
