#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bomp {

/// Operand shapes do not agree with each other or with a block partition.
class PartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization found a (numerically) dependent column.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, std::int64_t column)
      : std::runtime_error(what), column_(column) {}

  /// Offending column (or block, for block-wise factorizations).
  std::int64_t column() const noexcept { return column_; }

 private:
  std::int64_t column_;
};

/// Input too small or too structured for the requested quantity to exist.
class DegenerateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Residual has (numerically) no correlation with any true-support block.
class DegenerateResidualError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside a pursuit iteration; carries the 1-based iteration number.
class RecoveryError : public std::runtime_error {
 public:
  RecoveryError(const std::string& what, std::int64_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::int64_t iteration_;
};

}  // namespace bomp
