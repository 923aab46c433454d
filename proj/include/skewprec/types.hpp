#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewprec {

using Index = std::int64_t;

/// Base class for all errors raised by the library.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Shape mismatch between operands.
class DimensionError : public SolverError {
public:
  using SolverError::SolverError;
};

/// Malformed or unreadable input file.
class IoError : public SolverError {
public:
  using SolverError::SolverError;
};

/// No permutation puts a nonzero on every diagonal position.
class StructurallySingularError : public SolverError {
public:
  using SolverError::SolverError;
};

/// A factorization hit a pivot it cannot process; `column` is the position
/// (in the factor ordering) at which the breakdown occurred.
class FactorizationBreakdown : public SolverError {
public:
  FactorizationBreakdown(const std::string& what, Index column)
      : SolverError(what), column_(column) {}
  Index column() const { return column_; }

private:
  Index column_ = -1;
};

/// The least-squares system has numerically dependent columns; `columns`
/// names the unknowns that could not be resolved.
class RankDeficiencyError : public SolverError {
public:
  RankDeficiencyError(const std::string& what, std::vector<Index> columns)
      : SolverError(what), columns_(std::move(columns)) {}
  const std::vector<Index>& columns() const { return columns_; }

private:
  std::vector<Index> columns_;
};

} // namespace skewprec
