#include "skewprec/ordering.hpp"

#include <algorithm>
#include <queue>

namespace skewprec {

namespace {

struct Graph {
  std::vector<Index> ptr;
  std::vector<Index> adj;
  std::vector<Index> degree;
};

Graph build_undirected(const SparseMatrix& pattern) {
  if (!pattern.square())
    throw DimensionError("rcm_order: pattern not square");
  const SparseMatrix sym =
      add(pattern, transpose(pattern), 1.0, 1.0);
  const Index n = sym.ncols();
  Graph g;
  g.ptr.assign(n + 1, 0);
  for (Index j = 0; j < n; ++j) {
    for (Index p = sym.col_begin(j); p < sym.col_end(j); ++p)
      if (sym.row_at(p) != j)
        ++g.ptr[j + 1];
  }
  for (Index j = 0; j < n; ++j)
    g.ptr[j + 1] += g.ptr[j];
  g.adj.resize(g.ptr[n]);
  std::vector<Index> next(g.ptr.begin(), g.ptr.end() - 1);
  for (Index j = 0; j < n; ++j)
    for (Index p = sym.col_begin(j); p < sym.col_end(j); ++p)
      if (sym.row_at(p) != j)
        g.adj[next[j]++] = sym.row_at(p);
  g.degree.resize(n);
  for (Index j = 0; j < n; ++j)
    g.degree[j] = g.ptr[j + 1] - g.ptr[j];
  return g;
}

// BFS levels from `start` over unvisited vertices; returns the vertices of
// the last level and the eccentricity.
std::pair<std::vector<Index>, Index> bfs_levels(const Graph& g, Index start,
                                                const std::vector<char>& visited,
                                                std::vector<Index>& level) {
  std::fill(level.begin(), level.end(), Index(-1));
  std::queue<Index> q;
  q.push(start);
  level[start] = 0;
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (Index p = g.ptr[u]; p < g.ptr[u + 1]; ++p) {
      const Index w = g.adj[p];
      if (visited[w] || level[w] != -1)
        continue;
      level[w] = level[u] + 1;
      q.push(w);
    }
  }
  Index ecc = 0;
  for (Index l : level)
    ecc = std::max(ecc, l);
  std::vector<Index> last;
  for (Index i = 0; i < static_cast<Index>(level.size()); ++i)
    if (level[i] == ecc)
      last.push_back(i);
  return {std::move(last), ecc};
}

// George-Liu style pseudo-peripheral vertex: walk to a min-degree vertex of
// the deepest BFS level while the eccentricity keeps growing.
Index pseudo_peripheral(const Graph& g, Index start,
                        const std::vector<char>& visited,
                        std::vector<Index>& level) {
  Index v = start;
  auto [last, ecc] = bfs_levels(g, v, visited, level);
  while (true) {
    Index best = last.front();
    for (Index c : last)
      if (g.degree[c] < g.degree[best] ||
          (g.degree[c] == g.degree[best] && c < best))
        best = c;
    auto [last2, ecc2] = bfs_levels(g, best, visited, level);
    if (ecc2 <= ecc)
      return best;
    v = best;
    ecc = ecc2;
    last = std::move(last2);
  }
}

} // namespace

std::vector<Index> rcm_order(const SparseMatrix& pattern) {
  const Graph g = build_undirected(pattern);
  const Index n = static_cast<Index>(g.degree.size());
  std::vector<char> visited(n, 0);
  std::vector<Index> level(n);
  std::vector<Index> order;
  order.reserve(n);
  std::vector<Index> neighbors;

  for (Index root = 0; root < n; ++root) {
    if (visited[root])
      continue;
    const Index start = pseudo_peripheral(g, root, visited, level);
    // Cuthill-McKee BFS, neighbors by increasing degree then index.
    std::queue<Index> q;
    q.push(start);
    visited[start] = 1;
    while (!q.empty()) {
      const Index u = q.front();
      q.pop();
      order.push_back(u);
      neighbors.clear();
      for (Index p = g.ptr[u]; p < g.ptr[u + 1]; ++p)
        if (!visited[g.adj[p]])
          neighbors.push_back(g.adj[p]);
      std::sort(neighbors.begin(), neighbors.end(), [&](Index a, Index b) {
        if (g.degree[a] != g.degree[b])
          return g.degree[a] < g.degree[b];
        return a < b;
      });
      for (Index w : neighbors) {
        visited[w] = 1;
        q.push(w);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

Index bandwidth(const SparseMatrix& a) {
  Index b = 0;
  for (Index j = 0; j < a.ncols(); ++j)
    for (Index p = a.col_begin(j); p < a.col_end(j); ++p)
      b = std::max(b, std::abs(a.row_at(p) - j));
  return b;
}

} // namespace skewprec
