#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "skewprec/baseline.hpp"
#include "skewprec/matrix_market.hpp"
#include "skewprec/metrics.hpp"
#include "skewprec/skew_symmetrizer.hpp"
#include "skewprec/sparse_matrix.hpp"
#include "skewprec/transversal.hpp"
#include "skewprec/two_level.hpp"
#include "skewprec/types.hpp"

namespace {

using skewprec::Index;
using ojson = nlohmann::ordered_json;

template <class... Args>
std::string strf(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct SolveConfig {
  std::string matrix;
  std::string method = "two-level";
  std::string pattern = "tri";
  double gamma = 1.0;
  std::string ildl = "nofill";
  Index lanczos_k = 20;
  double tol = 1e-5;
  Index maxit = 2000;
  std::string rhs = "ones";
  std::string out = "text";
};

struct MetricsConfig {
  std::string matrix;
  double gamma = 1.0;
  std::string out = "text";
};

struct CompareConfig {
  std::string list;
  std::string pattern = "tri";
  double gamma = 1.0;
  Index lanczos_k = 20;
  double tol = 1e-5;
  Index maxit = 2000;
};

skewprec::SymmetrizerPattern parse_pattern(const std::string& name) {
  if (name == "diag") return skewprec::SymmetrizerPattern::diagonal;
  if (name == "tri") return skewprec::SymmetrizerPattern::tridiagonal;
  return skewprec::SymmetrizerPattern::pattern_of_matrix;
}

skewprec::IldlVariant parse_ildl(const std::string& name) {
  if (name == "nofill") return skewprec::IldlVariant::nofill();
  if (name == "t1e-1") return skewprec::IldlVariant::threshold(1e-1);
  return skewprec::IldlVariant::threshold(1e-2);
}

/// SKEWPREC_SEED pins any randomized start vectors. The default pipeline
/// is deterministic, so for now the value is only validated and echoed
/// into reports.
std::optional<unsigned long long> read_seed() {
  const char* raw = std::getenv("SKEWPREC_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0')
    throw std::invalid_argument(std::string("SKEWPREC_SEED is not an unsigned integer: '") + raw + "'");
  return seed;
}

std::vector<double> read_vector_file(const std::filesystem::path& path, Index n) {
  std::ifstream probe(path);
  if (!probe)
    throw skewprec::IoError("cannot open right-hand side file '" + path.string() + "'");
  std::string banner;
  std::getline(probe, banner);
  if (banner.rfind("%%MatrixMarket", 0) == 0) {
    const skewprec::SparseMatrix v = skewprec::read_matrix_market(path);
    if (v.ncols() != 1 || v.nrows() != n)
      throw skewprec::IoError(strf("right-hand side '%s' is %lld x %lld, expected %lld x 1",
                                   path.string().c_str(), (long long)v.nrows(),
                                   (long long)v.ncols(), (long long)n));
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (Index p = v.col_begin(0); p < v.col_end(0); ++p)
      b[static_cast<std::size_t>(v.row_at(p))] = v.value_at(p);
    return b;
  }
  probe.clear();
  probe.seekg(0);
  std::vector<double> b;
  double value = 0.0;
  while (probe >> value) b.push_back(value);
  if (!probe.eof())
    throw skewprec::IoError("unparsable entry in right-hand side file '" + path.string() + "'");
  if (static_cast<Index>(b.size()) != n)
    throw skewprec::IoError(strf("right-hand side '%s' has %zu entries, expected %lld",
                                 path.string().c_str(), b.size(), (long long)n));
  return b;
}

std::vector<double> build_rhs(const std::string& mode, const skewprec::SparseMatrix& a) {
  if (mode == "ones") {
    const std::vector<double> ones(static_cast<std::size_t>(a.ncols()), 1.0);
    return skewprec::spmv(a, ones);
  }
  return read_vector_file(mode.substr(5), a.nrows());
}

int exit_code_for(skewprec::SolveStatus status) {
  switch (status) {
    case skewprec::SolveStatus::converged: return 0;
    case skewprec::SolveStatus::breakdown: return 3;
    default: return 2;
  }
}

/// Table-style rendering of one report field: iteration averages and
/// percentages with one decimal, residuals in scientific notation. JSON
/// output bypasses this and keeps full precision.
std::string cell_text(const std::string& key, const ojson& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_float()) {
    const double x = value.get<double>();
    if (key == "avg_inner_iterations" || key == "rank_percent" || key == "wall_time_ms")
      return strf("%.1f", x);
    if (key.rfind("relres", 0) == 0 || key == "lls_objective") return strf("%.3e", x);
    return strf("%g", x);
  }
  return value.dump();
}

void emit(const ojson& report, const std::string& out) {
  if (out == "json") {
    std::printf("%s\n", report.dump(2).c_str());
    return;
  }
  if (out == "csv") {
    std::string header, row;
    for (const auto& [key, value] : report.items()) {
      if (!value.is_primitive()) continue;
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += key;
      row += cell_text(key, value);
    }
    std::printf("%s\n%s\n", header.c_str(), row.c_str());
    return;
  }
  for (const auto& [key, value] : report.items()) {
    if (!value.is_primitive()) continue;
    std::printf("%-22s %s\n", key.c_str(), cell_text(key, value).c_str());
  }
}

int run_solve(const SolveConfig& cfg) {
  if (cfg.rhs != "ones" && cfg.rhs.rfind("file:", 0) != 0) {
    std::fprintf(stderr, "error: --rhs must be 'ones' or 'file:<path>'\n");
    return 2;
  }
  const auto seed = read_seed();
  const skewprec::SparseMatrix a = skewprec::read_matrix_market(cfg.matrix);
  if (!a.square())
    throw skewprec::DimensionError(strf("matrix '%s' is %lld x %lld, solve needs a square system",
                                        cfg.matrix.c_str(), (long long)a.nrows(),
                                        (long long)a.ncols()));
  const std::vector<double> b = build_rhs(cfg.rhs, a);

  ojson report;
  report["matrix"] = cfg.matrix;
  report["method"] = cfg.method;
  report["n"] = a.nrows();
  report["nnz"] = a.nnz();
  report["tol"] = cfg.tol;
  report["maxit"] = cfg.maxit;
  report["rhs"] = cfg.rhs;
  if (seed) report["seed"] = *seed;

  skewprec::SolveStatus status = skewprec::SolveStatus::maxit;
  const auto start = std::chrono::steady_clock::now();
  if (cfg.method == "two-level") {
    skewprec::TwoLevelOptions opt;
    opt.pattern = parse_pattern(cfg.pattern);
    opt.gamma = cfg.gamma;
    opt.ildl = parse_ildl(cfg.ildl);
    opt.lanczos_k = cfg.lanczos_k;
    opt.tol = cfg.tol;
    opt.maxit = cfg.maxit;
    const skewprec::TwoLevelReport rep = skewprec::two_level_solve(a, b, opt);
    status = rep.status;
    report["pattern"] = cfg.pattern;
    report["gamma"] = cfg.gamma;
    report["ildl"] = cfg.ildl;
    report["status"] = skewprec::to_string(rep.status);
    report["converged"] = rep.status == skewprec::SolveStatus::converged;
    report["outer_iterations"] = rep.outer_iterations;
    report["avg_inner_iterations"] = rep.inner.average();
    report["setup_inner_iterations"] = rep.setup_inner_iterations;
    report["relres"] = rep.relres;
    report["relres_preprocessed"] = rep.relres_modified;
    report["rank"] = rep.rank;
    report["rank_percent"] = 100.0 * double(rep.rank) / double(a.nrows());
    report["lanczos_k"] = rep.lanczos_k;
    report["pivot_2x2"] = rep.pivot_2x2_count;
    report["lls_objective"] = rep.lls_objective;
  } else {
    skewprec::BaselineOptions opt;
    opt.tol = cfg.tol;
    opt.maxit = cfg.maxit;
    const skewprec::BaselineReport rep = skewprec::mps_rcm_solve(a, b, opt);
    status = rep.status;
    report["status"] = skewprec::to_string(rep.status);
    report["converged"] = rep.status == skewprec::SolveStatus::converged;
    report["outer_iterations"] = rep.iterations;
    report["relres"] = rep.relres;
    report["relres_preprocessed"] = rep.relres_scaled;
  }
  const auto stop = std::chrono::steady_clock::now();
  report["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(stop - start).count();

  emit(report, cfg.out);
  return exit_code_for(status);
}

int run_metrics(const MetricsConfig& cfg) {
  const skewprec::SparseMatrix a = skewprec::read_matrix_market(cfg.matrix);
  const auto matching = skewprec::max_product_transversal(a);
  const auto scaled = skewprec::apply_transversal(a, matching);

  const char* names[4] = {"original", "mc64", "mc64+s_diag", "mc64+s_tri"};
  skewprec::MatrixMetrics rows[4] = {
      skewprec::metrics(a),
      skewprec::metrics(scaled.scaled),
      skewprec::metrics(
          skewprec::skew_symmetrize(a, skewprec::SymmetrizerPattern::diagonal, cfg.gamma).a_hat),
      skewprec::metrics(
          skewprec::skew_symmetrize(a, skewprec::SymmetrizerPattern::tridiagonal, cfg.gamma).a_hat),
  };

  if (cfg.out == "json") {
    ojson report;
    report["matrix"] = cfg.matrix;
    report["n"] = a.nrows();
    report["nnz"] = a.nnz();
    report["gamma"] = cfg.gamma;
    report["stages"] = ojson::array();
    for (int s = 0; s < 4; ++s)
      report["stages"].push_back({{"stage", names[s]},
                                  {"skew_ratio_percent", 100.0 * rows[s].skew_symmetry_ratio},
                                  {"diagonal_distance", rows[s].diagonal_distance}});
    std::printf("%s\n", report.dump(2).c_str());
    return 0;
  }
  if (cfg.out == "csv") {
    std::printf("stage,skew_ratio_percent,diagonal_distance\n");
    for (int s = 0; s < 4; ++s)
      std::printf("%s,%.1f,%.3g\n", names[s], 100.0 * rows[s].skew_symmetry_ratio,
                  rows[s].diagonal_distance);
    return 0;
  }
  std::printf("matrix %s (n = %lld, nnz = %lld)\n\n", cfg.matrix.c_str(),
              (long long)a.nrows(), (long long)a.nnz());
  std::printf("%-14s %12s %16s\n", "stage", "skew ratio", "diag distance");
  for (int s = 0; s < 4; ++s)
    std::printf("%-14s %11.1f%% %16.3g\n", names[s], 100.0 * rows[s].skew_symmetry_ratio,
                rows[s].diagonal_distance);
  return 0;
}

/// One grid cell of the comparison table. Converged runs show the paper's
/// "outer(avg inner)" shape, everything else shows its termination class.
std::string compare_cell(const skewprec::SparseMatrix& a, const std::vector<double>& b,
                         const CompareConfig& cfg, const std::string& ildl) {
  try {
    if (ildl.empty()) {
      skewprec::BaselineOptions opt;
      opt.tol = cfg.tol;
      opt.maxit = cfg.maxit;
      const auto rep = skewprec::mps_rcm_solve(a, b, opt);
      if (rep.status != skewprec::SolveStatus::converged)
        return skewprec::to_string(rep.status);
      return strf("%g", rep.iterations);
    }
    skewprec::TwoLevelOptions opt;
    opt.pattern = parse_pattern(cfg.pattern);
    opt.gamma = cfg.gamma;
    opt.ildl = parse_ildl(ildl);
    opt.lanczos_k = cfg.lanczos_k;
    opt.tol = cfg.tol;
    opt.maxit = cfg.maxit;
    const auto rep = skewprec::two_level_solve(a, b, opt);
    if (rep.status != skewprec::SolveStatus::converged)
      return skewprec::to_string(rep.status);
    return strf("%g(%.1f)", rep.outer_iterations, rep.inner.average());
  } catch (const skewprec::SolverError&) {
    return "error";
  }
}

int run_compare(const CompareConfig& cfg) {
  std::ifstream list(cfg.list);
  if (!list)
    throw skewprec::IoError("cannot open matrix list '" + cfg.list + "'");

  std::printf("matrix,n,nnz,two-level-nofill,two-level-t1e-1,two-level-t1e-2,mps-rcm\n");
  std::string line;
  while (std::getline(list, line)) {
    const auto from = line.find_first_not_of(" \t\r");
    if (from == std::string::npos || line[from] == '#') continue;
    const auto to = line.find_last_not_of(" \t\r");
    std::filesystem::path path = line.substr(from, to - from + 1);
    if (!std::filesystem::exists(path) && path.is_relative())
      path = std::filesystem::path(cfg.list).parent_path() / path;

    const std::string name = path.stem().string();
    skewprec::SparseMatrix a;
    try {
      a = skewprec::read_matrix_market(path);
      if (!a.square())
        throw skewprec::IoError("matrix is not square");
    } catch (const skewprec::SolverError&) {
      std::printf("%s,,,error,error,error,error\n", name.c_str());
      continue;
    }
    const std::vector<double> ones(static_cast<std::size_t>(a.ncols()), 1.0);
    const std::vector<double> b = skewprec::spmv(a, ones);
    std::printf("%s,%lld,%lld,%s,%s,%s,%s\n", name.c_str(), (long long)a.nrows(),
                (long long)a.nnz(), compare_cell(a, b, cfg, "nofill").c_str(),
                compare_cell(a, b, cfg, "t1e-1").c_str(),
                compare_cell(a, b, cfg, "t1e-2").c_str(),
                compare_cell(a, b, cfg, "").c_str());
    std::fflush(stdout);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-level preconditioning workbench for sparse linear systems"};
  app.require_subcommand(1);

  SolveConfig solve_cfg;
  CLI::App* solve = app.add_subcommand("solve", "run one solver on one matrix");
  solve->add_option("--matrix", solve_cfg.matrix, "matrix market file")->required();
  solve->add_option("--method", solve_cfg.method, "solver pipeline")
      ->check(CLI::IsMember({"two-level", "mps-rcm"}));
  solve->add_option("--pattern", solve_cfg.pattern, "symmetrizer sparsity pattern")
      ->check(CLI::IsMember({"diag", "tri", "like-a"}));
  solve->add_option("--gamma", solve_cfg.gamma, "symmetrizer skew weight");
  solve->add_option("--ildl", solve_cfg.ildl, "incomplete factorization variant")
      ->check(CLI::IsMember({"nofill", "t1e-1", "t1e-2"}));
  solve->add_option("--k", solve_cfg.lanczos_k, "deflation subspace dimension")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--tol", solve_cfg.tol, "relative residual target");
  solve->add_option("--maxit", solve_cfg.maxit, "outer iteration cap")
      ->check(CLI::PositiveNumber);
  solve->add_option("--rhs", solve_cfg.rhs, "ones (b = A*1) or file:<path>");
  solve->add_option("--out", solve_cfg.out, "report format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  MetricsConfig metrics_cfg;
  CLI::App* metrics = app.add_subcommand("metrics", "symmetry metrics per preprocessing stage");
  metrics->add_option("--matrix", metrics_cfg.matrix, "matrix market file")->required();
  metrics->add_option("--gamma", metrics_cfg.gamma, "symmetrizer skew weight");
  metrics->add_option("--out", metrics_cfg.out, "report format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  CompareConfig compare_cfg;
  CLI::App* compare = app.add_subcommand("compare", "batch table over a matrix list");
  compare->add_option("--list", compare_cfg.list, "file with one matrix path per line")
      ->required();
  compare->add_option("--pattern", compare_cfg.pattern, "symmetrizer sparsity pattern")
      ->check(CLI::IsMember({"diag", "tri", "like-a"}));
  compare->add_option("--gamma", compare_cfg.gamma, "symmetrizer skew weight");
  compare->add_option("--k", compare_cfg.lanczos_k, "deflation subspace dimension")
      ->check(CLI::NonNegativeNumber);
  compare->add_option("--tol", compare_cfg.tol, "relative residual target");
  compare->add_option("--maxit", compare_cfg.maxit, "outer iteration cap")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(solve_cfg);
    if (metrics->parsed()) return run_metrics(metrics_cfg);
    return run_compare(compare_cfg);
  } catch (const skewprec::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const skewprec::DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const skewprec::SolverError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
