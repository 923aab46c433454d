#pragma once

#include <filesystem>

#include "skewprec/sparse_matrix.hpp"

namespace skewprec {

/// Reads a Matrix Market coordinate file. Symmetric and skew-symmetric
/// storage is expanded to the full pattern, duplicate entries are summed and
/// explicitly stored zeros are kept. Throws IoError with the offending line
/// number on malformed input.
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes coordinate/real/general with 1-based indices and %.17g values, so
/// a read-back reproduces the matrix exactly.
void write_matrix_market(const SparseMatrix& a,
                         const std::filesystem::path& path);

} // namespace skewprec
