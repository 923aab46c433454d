#include "skewprec/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace skewprec {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::filesystem::path& path, long line,
                       const std::string& msg) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << msg;
  throw IoError(os.str());
}

} // namespace

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());

  std::string line;
  long lineno = 0;
  if (!std::getline(in, line))
    fail(path, 1, "empty file");
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
    fail(path, lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate")
    fail(path, lineno, "only coordinate matrices are supported");
  const bool pattern = field == "pattern";
  if (field != "real" && field != "integer" && !pattern)
    fail(path, lineno, "unsupported field type '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  const bool skew = symmetry == "skew-symmetric";
  if (!symmetric && !skew && symmetry != "general")
    fail(path, lineno, "unsupported symmetry '" + symmetry + "'");

  // Skip comments and blank lines up to the size line.
  Index nrows = 0, ncols = 0;
  long declared_nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%')
      continue;
    std::istringstream sizes(line);
    if (!(sizes >> nrows >> ncols >> declared_nnz)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue; // blank
      fail(path, lineno, "malformed size line");
    }
    break;
  }
  if (declared_nnz < 0)
    fail(path, lineno, "missing size line");
  if (nrows < 0 || ncols < 0)
    fail(path, lineno, "negative dimension");

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(declared_nnz) * (symmetric || skew ? 2 : 1));
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' ||
        line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream entry(line);
    Index i = 0, j = 0;
    double v = 1.0;
    if (!(entry >> i >> j))
      fail(path, lineno, "malformed entry");
    if (!pattern && !(entry >> v))
      fail(path, lineno, "entry is missing its value");
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      fail(path, lineno, "entry index out of range");
    --i;
    --j;
    ++seen;
    if (skew && i == j)
      fail(path, lineno, "skew-symmetric file stores a diagonal entry");
    trips.push_back({i, j, v});
    if (symmetric && i != j)
      trips.push_back({j, i, v});
    else if (skew)
      trips.push_back({j, i, -v});
  }
  if (seen != declared_nnz)
    fail(path, lineno,
         "entry count " + std::to_string(seen) + " does not match header " +
             std::to_string(declared_nnz));
  return SparseMatrix::from_triplets(nrows, ncols, trips);
}

void write_matrix_market(const SparseMatrix& a,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.nrows() << " " << a.ncols() << " " << a.nnz() << "\n";
  char buf[64];
  for (Index j = 0; j < a.ncols(); ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p) {
      std::snprintf(buf, sizeof(buf), "%.17g", a.value_at(p));
      out << (a.row_at(p) + 1) << " " << (j + 1) << " " << buf << "\n";
    }
  if (!out)
    throw IoError("write failed for " + path.string());
}

} // namespace skewprec
