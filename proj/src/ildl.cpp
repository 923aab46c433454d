#include "skewprec/ildl.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "skewprec/types.hpp"

namespace skewprec {

namespace {

constexpr double kBkAlpha = 0.6403882032022076; // (1 + sqrt(17)) / 8

struct Candidate {
  Index row;
  double val;
};

/// Left-looking block factorization state. Committed columns keep their row
/// indices in the current (pivoted) numbering; rowlist_[i] records where row
/// i appears so symmetric swaps only relabel indices instead of moving data.
class IldlWorker {
public:
  IldlWorker(const SparseMatrix& m, const IldlVariant& variant)
      : m_(m), variant_(variant), n_(m.ncols()), perm_(n_), inv_(n_),
        col_block_(n_, -1), cols_(n_), rowlist_(n_), w1_(n_, 0.0),
        w2_(n_, 0.0), mark1_(n_, 0), mark2_(n_, 0) {
    for (Index i = 0; i < n_; ++i) {
      perm_[i] = i;
      inv_[i] = i;
    }
  }

  BlockLdlFactor run() {
    Index k = 0;
    while (k < n_) {
      k += step(k);
    }

    std::vector<Triplet> trips;
    for (Index j = 0; j < n_; ++j) {
      trips.push_back({j, j, 1.0});
      for (std::size_t p = 0; p < cols_[j].rows.size(); ++p) {
        trips.push_back({cols_[j].rows[p], j, cols_[j].vals[p]});
      }
    }

    BlockLdlFactor out;
    out.l = SparseMatrix::from_triplets(n_, n_, trips);
    out.d = std::move(blocks_);
    out.perm = std::move(perm_);
    out.pivot_2x2_count = pivot_2x2_count_;
    return out;
  }

private:
  struct FactorColumn {
    std::vector<Index> rows;
    std::vector<double> vals;
  };

  const SparseMatrix& m_;
  IldlVariant variant_;
  Index n_;
  std::vector<Index> perm_, inv_;
  std::vector<PivotBlock> blocks_;
  std::vector<Index> col_block_;
  std::vector<FactorColumn> cols_;
  std::vector<std::vector<std::pair<Index, Index>>> rowlist_;
  std::vector<double> w1_, w2_;
  std::vector<char> mark1_, mark2_;
  std::vector<Index> touched1_, touched2_;
  std::vector<Index> blockmark_;
  Index gather_id_ = 0;
  Index pivot_2x2_count_ = 0;

  double value_in_row(Index row, Index col) const {
    for (const auto& [c, pos] : rowlist_[row]) {
      if (c == col) {
        return cols_[col].vals[pos];
      }
    }
    return 0.0;
  }

  /// w = column `c` of the Schur complement of the committed blocks,
  /// restricted to rows >= k in the current numbering.
  void gather(Index c, Index k, std::vector<double>& w, std::vector<char>& mark,
              std::vector<Index>& touched) {
    ++gather_id_;
    blockmark_.resize(blocks_.size(), -1);
    auto touch = [&](Index i) {
      if (!mark[i]) {
        mark[i] = 1;
        touched.push_back(i);
        w[i] = 0.0;
      }
    };
    touch(c);

    const Index orig = perm_[c];
    for (Index p = m_.col_begin(orig); p < m_.col_end(orig); ++p) {
      const Index i = inv_[m_.row_at(p)];
      if (i < k) {
        continue;
      }
      touch(i);
      w[i] += m_.value_at(p);
    }

    for (const auto& [j, pos] : rowlist_[c]) {
      const Index bidx = col_block_[j];
      if (blockmark_[bidx] == gather_id_) {
        continue;
      }
      blockmark_[bidx] = gather_id_;
      const PivotBlock& blk = blocks_[bidx];
      if (blk.size == 1) {
        const double f = blk.a * cols_[j].vals[pos];
        subtract_scaled(j, f, k, w, mark, touched);
      } else {
        const Index j1 = blk.start;
        const Index j2 = blk.start + 1;
        const double lc1 = (j == j1) ? cols_[j].vals[pos] : value_in_row(c, j1);
        const double lc2 = (j == j2) ? cols_[j].vals[pos] : value_in_row(c, j2);
        subtract_scaled(j1, blk.a * lc1 + blk.b * lc2, k, w, mark, touched);
        subtract_scaled(j2, blk.b * lc1 + blk.c * lc2, k, w, mark, touched);
      }
    }
  }

  void subtract_scaled(Index j, double f, Index k, std::vector<double>& w,
                       std::vector<char>& mark, std::vector<Index>& touched) {
    if (f == 0.0) {
      return;
    }
    auto touch = [&](Index i) {
      if (!mark[i]) {
        mark[i] = 1;
        touched.push_back(i);
        w[i] = 0.0;
      }
    };
    for (std::size_t p = 0; p < cols_[j].rows.size(); ++p) {
      const Index i = cols_[j].rows[p];
      if (i < k) {
        continue;
      }
      touch(i);
      w[i] -= f * cols_[j].vals[p];
    }
  }

  void clear(std::vector<char>& mark, std::vector<Index>& touched) {
    for (const Index i : touched) {
      mark[i] = 0;
    }
    touched.clear();
  }

  void swap_positions(Index a, Index b) {
    if (a == b) {
      return;
    }
    for (const auto& [c, pos] : rowlist_[a]) {
      cols_[c].rows[pos] = b;
    }
    for (const auto& [c, pos] : rowlist_[b]) {
      cols_[c].rows[pos] = a;
    }
    std::swap(rowlist_[a], rowlist_[b]);
    std::swap(perm_[a], perm_[b]);
    inv_[perm_[a]] = a;
    inv_[perm_[b]] = b;
  }

  std::vector<Candidate> drop(std::vector<Candidate> cand, Index orig_col) {
    if (variant_.kind == IldlVariant::Kind::threshold) {
      if (variant_.tau > 0.0 && !cand.empty()) {
        double norm = 0.0;
        for (const Candidate& c : cand) {
          norm += c.val * c.val;
        }
        norm = std::sqrt(norm);
        const double cutoff = variant_.tau * norm;
        std::erase_if(cand,
                      [&](const Candidate& c) { return std::abs(c.val) < cutoff; });
      }
    } else {
      const std::size_t cap = static_cast<std::size_t>(m_.col_end(orig_col) -
                                                       m_.col_begin(orig_col));
      if (cand.size() > cap) {
        std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
          const double ax = std::abs(x.val);
          const double ay = std::abs(y.val);
          return ax != ay ? ax > ay : x.row < y.row;
        });
        cand.resize(cap);
      }
    }
    std::sort(cand.begin(), cand.end(),
              [](const Candidate& x, const Candidate& y) { return x.row < y.row; });
    return cand;
  }

  void store_column(Index k, std::vector<Candidate> cand) {
    cols_[k].rows.reserve(cand.size());
    cols_[k].vals.reserve(cand.size());
    for (const Candidate& c : cand) {
      rowlist_[c.row].emplace_back(k, Index(cols_[k].rows.size()));
      cols_[k].rows.push_back(c.row);
      cols_[k].vals.push_back(c.val);
    }
  }

  void commit_1x1(Index k) {
    const double d = w1_[k];
    if (d == 0.0 || !std::isfinite(d)) {
      throw FactorizationBreakdown("ildl: singular 1x1 pivot", perm_[k]);
    }
    col_block_[k] = Index(blocks_.size());
    blocks_.push_back({k, 1, d, 0.0, 0.0});

    std::vector<Candidate> cand;
    for (const Index i : touched1_) {
      if (i > k && w1_[i] != 0.0) {
        cand.push_back({i, w1_[i] / d});
      }
    }
    std::sort(cand.begin(), cand.end(),
              [](const Candidate& x, const Candidate& y) { return x.row < y.row; });
    store_column(k, drop(std::move(cand), perm_[k]));
  }

  void commit_2x2(Index k) {
    const double a = w1_[k];
    const double b = w1_[k + 1];
    const double c = w2_[k + 1];
    const double det = a * c - b * b;
    if (det == 0.0 || !std::isfinite(det)) {
      throw FactorizationBreakdown("ildl: singular 2x2 pivot", perm_[k]);
    }
    col_block_[k] = Index(blocks_.size());
    col_block_[k + 1] = Index(blocks_.size());
    blocks_.push_back({k, 2, a, b, c});
    ++pivot_2x2_count_;

    std::vector<Candidate> c1, c2;
    auto add = [&](Index i) {
      const double wi = mark1_[i] ? w1_[i] : 0.0;
      const double vi = mark2_[i] ? w2_[i] : 0.0;
      if (wi == 0.0 && vi == 0.0) {
        return;
      }
      const double l1 = (c * wi - b * vi) / det;
      const double l2 = (a * vi - b * wi) / det;
      if (l1 != 0.0) {
        c1.push_back({i, l1});
      }
      if (l2 != 0.0) {
        c2.push_back({i, l2});
      }
    };
    for (const Index i : touched1_) {
      if (i > k + 1) {
        add(i);
      }
    }
    for (const Index i : touched2_) {
      if (i > k + 1 && !mark1_[i]) {
        add(i);
      }
    }
    std::sort(c1.begin(), c1.end(),
              [](const Candidate& x, const Candidate& y) { return x.row < y.row; });
    std::sort(c2.begin(), c2.end(),
              [](const Candidate& x, const Candidate& y) { return x.row < y.row; });
    store_column(k, drop(std::move(c1), perm_[k]));
    store_column(k + 1, drop(std::move(c2), perm_[k + 1]));
  }

  /// Factors one pivot block starting at position k; returns its size.
  Index step(Index k) {
    clear(mark1_, touched1_);
    clear(mark2_, touched2_);
    gather(k, k, w1_, mark1_, touched1_);

    double omega1 = 0.0;
    Index rmax = -1;
    for (const Index i : touched1_) {
      if (i <= k) {
        continue;
      }
      const double ai = std::abs(w1_[i]);
      if (ai > omega1 || (ai == omega1 && rmax >= 0 && i < rmax)) {
        omega1 = ai;
        rmax = i;
      }
    }
    if (omega1 == 0.0) {
      commit_1x1(k);
      return 1;
    }
    if (std::abs(w1_[k]) >= kBkAlpha * omega1) {
      commit_1x1(k);
      return 1;
    }

    gather(rmax, k, w2_, mark2_, touched2_);
    double omega_r = 0.0;
    for (const Index i : touched2_) {
      if (i != rmax) {
        omega_r = std::max(omega_r, std::abs(w2_[i]));
      }
    }
    if (std::abs(w1_[k]) * omega_r >= kBkAlpha * omega1 * omega1) {
      commit_1x1(k);
      return 1;
    }
    if (std::abs(w2_[rmax]) >= kBkAlpha * omega_r) {
      swap_positions(k, rmax);
      clear(mark1_, touched1_);
      gather(k, k, w1_, mark1_, touched1_);
      commit_1x1(k);
      return 1;
    }

    swap_positions(k + 1, rmax);
    clear(mark1_, touched1_);
    clear(mark2_, touched2_);
    gather(k, k, w1_, mark1_, touched1_);
    gather(k + 1, k, w2_, mark2_, touched2_);
    commit_2x2(k);
    return 2;
  }
};

void check_symmetric(const SparseMatrix& m) {
  if (m.nrows() != m.ncols()) {
    throw DimensionError("ildl_factor: matrix must be square");
  }
  const SparseMatrix diff = add(m, transpose(m), 1.0, -1.0);
  if (frobenius_norm(diff) > 1e-10 * (frobenius_norm(m) + 1.0)) {
    throw DimensionError("ildl_factor: matrix must be symmetric");
  }
}

/// Eigendecomposition of [[a, b], [b, c]] by Jacobi rotation; eigenvector
/// columns are (co, si) for lam1 and (-si, co) for lam2.
struct SymEig2 {
  double lam1, lam2, co, si;
};

SymEig2 sym_eig_2x2(double a, double b, double c) {
  if (b == 0.0) {
    return {a, c, 1.0, 0.0};
  }
  const double phi = 0.5 * std::atan2(2.0 * b, a - c);
  const double co = std::cos(phi);
  const double si = std::sin(phi);
  const double lam1 = a * co * co + 2.0 * b * co * si + c * si * si;
  const double lam2 = a * si * si - 2.0 * b * co * si + c * co * co;
  return {lam1, lam2, co, si};
}

} // namespace

BlockLdlFactor ildl_factor(const SparseMatrix& m, const IldlVariant& variant) {
  check_symmetric(m);
  if (variant.kind == IldlVariant::Kind::threshold &&
      !(variant.tau >= 0.0 && std::isfinite(variant.tau))) {
    throw DimensionError("ildl_factor: drop threshold must be finite and >= 0");
  }
  IldlWorker worker(m, variant);
  return worker.run();
}

AbsFactor abs_modify(const BlockLdlFactor& factor) {
  const Index n = factor.l.ncols();
  std::vector<Triplet> ld, mr;
  std::vector<Index> ind;
  Index rank = 0;

  for (const PivotBlock& blk : factor.d) {
    const Index k = blk.start;
    if (blk.size == 1) {
      ld.push_back({k, k, std::sqrt(std::abs(blk.a))});
      if (blk.a < 0.0) {
        mr.push_back({k, k, -2.0});
        ind.push_back(k);
        ++rank;
      }
      continue;
    }

    const SymEig2 eig = sym_eig_2x2(blk.a, blk.b, blk.c);
    const double abs1 = std::abs(eig.lam1);
    const double abs2 = std::abs(eig.lam2);
    const double p11 = abs1 * eig.co * eig.co + abs2 * eig.si * eig.si;
    const double p12 = (abs1 - abs2) * eig.co * eig.si;
    const double l11 = std::sqrt(p11);
    const double l21 = p12 / l11;
    const double l22 = std::sqrt(abs1 * abs2 / p11);
    ld.push_back({k, k, l11});
    ld.push_back({k + 1, k, l21});
    ld.push_back({k + 1, k + 1, l22});

    const int neg = (eig.lam1 < 0.0) + (eig.lam2 < 0.0);
    rank += neg;
    if (neg == 2) {
      mr.push_back({k, k, -2.0});
      mr.push_back({k + 1, k + 1, -2.0});
      ind.insert(ind.end(), {k, k + 1});
    } else if (neg == 1) {
      const double i11 = 1.0 / l11;
      const double i21 = -l21 / (l11 * l22);
      const double i22 = 1.0 / l22;
      const double t11 = i11 * blk.a;
      const double t12 = i11 * blk.b;
      const double t21 = i21 * blk.a + i22 * blk.b;
      const double t22 = i21 * blk.b + i22 * blk.c;
      const double g11 = t11 * i11 - 1.0;
      const double g12 = t11 * i21 + t12 * i22;
      const double g22 = t21 * i21 + t22 * i22 - 1.0;
      double u1 = std::sqrt(std::max(0.0, -0.5 * g11));
      double u2 = std::sqrt(std::max(0.0, -0.5 * g22));
      if (u2 != 0.0 && g12 > 0.0) {
        u2 = -u2;
      }
      const double nrm = std::hypot(u1, u2);
      u1 /= nrm;
      u2 /= nrm;
      if (std::abs(u1) < 1e-14) {
        u1 = 0.0;
        u2 = u2 < 0.0 ? -1.0 : 1.0;
      } else if (std::abs(u2) < 1e-14) {
        u2 = 0.0;
        u1 = 1.0;
      }
      if (u1 != 0.0) {
        mr.push_back({k, k, -2.0 * u1 * u1});
        ind.push_back(k);
      }
      if (u1 != 0.0 && u2 != 0.0) {
        mr.push_back({k, k + 1, -2.0 * u1 * u2});
        mr.push_back({k + 1, k, -2.0 * u1 * u2});
      }
      if (u2 != 0.0) {
        mr.push_back({k + 1, k + 1, -2.0 * u2 * u2});
        ind.push_back(k + 1);
      }
    }
  }

  AbsFactor out;
  out.l = multiply(factor.l, SparseMatrix::from_triplets(n, n, ld));
  out.perm = factor.perm;
  out.m_r = SparseMatrix::from_triplets(n, n, mr);
  out.ind = std::move(ind);
  out.rank = rank;
  return out;
}

LowRankTerm low_rank_decompose(const SparseMatrix& m_r,
                               std::span<const Index> ind, Index rank) {
  const Index n = m_r.nrows();
  const Index nloc = Index(ind.size());
  std::vector<Triplet> trips;
  std::vector<double> sigma;

  Index i = 0;
  while (i < nloc) {
    const double off =
        (i + 1 < nloc) ? m_r.coeff(ind[i], ind[i + 1]) : 0.0;
    const Index j = Index(sigma.size());
    if (off != 0.0) {
      const double g11 = m_r.coeff(ind[i], ind[i]);
      const double g22 = m_r.coeff(ind[i + 1], ind[i + 1]);
      double u1 = std::sqrt(std::max(0.0, -0.5 * g11));
      double u2 = std::sqrt(std::max(0.0, -0.5 * g22));
      if (off > 0.0) {
        u2 = -u2;
      }
      const double nrm = std::hypot(u1, u2);
      trips.push_back({ind[i], j, u1 / nrm});
      trips.push_back({ind[i + 1], j, u2 / nrm});
      i += 2;
    } else {
      trips.push_back({ind[i], j, 1.0});
      i += 1;
    }
    sigma.push_back(-2.0);
  }

  if (Index(sigma.size()) != rank) {
    throw SolverError("low_rank_decompose: walk produced " +
                      std::to_string(sigma.size()) + " columns for rank " +
                      std::to_string(rank));
  }
  LowRankTerm out;
  out.u = SparseMatrix::from_triplets(n, rank, trips);
  out.sigma = std::move(sigma);
  return out;
}

std::vector<double> solve_with_l(const AbsFactor& f,
                                 std::span<const double> b) {
  const Index n = f.l.ncols();
  if (Index(b.size()) != n) {
    throw DimensionError("solve_with_l: size mismatch");
  }
  std::vector<double> y(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = b[f.perm[i]];
  }
  for (Index j = 0; j < n; ++j) {
    const Index p0 = f.l.col_begin(j);
    if (p0 == f.l.col_end(j) || f.l.row_at(p0) != j) {
      throw SolverError("solve_with_l: missing diagonal");
    }
    const double yj = y[j] / f.l.value_at(p0);
    y[j] = yj;
    for (Index p = p0 + 1; p < f.l.col_end(j); ++p) {
      y[f.l.row_at(p)] -= f.l.value_at(p) * yj;
    }
  }
  return y;
}

std::vector<double> solve_with_lt(const AbsFactor& f,
                                  std::span<const double> b) {
  const Index n = f.l.ncols();
  if (Index(b.size()) != n) {
    throw DimensionError("solve_with_lt: size mismatch");
  }
  std::vector<double> y(b.begin(), b.end());
  for (Index j = n - 1; j >= 0; --j) {
    const Index p0 = f.l.col_begin(j);
    if (p0 == f.l.col_end(j) || f.l.row_at(p0) != j) {
      throw SolverError("solve_with_lt: missing diagonal");
    }
    double s = y[j];
    for (Index p = p0 + 1; p < f.l.col_end(j); ++p) {
      s -= f.l.value_at(p) * y[f.l.row_at(p)];
    }
    y[j] = s / f.l.value_at(p0);
  }
  std::vector<double> x(n);
  for (Index i = 0; i < n; ++i) {
    x[f.perm[i]] = y[i];
  }
  return x;
}

} // namespace skewprec
