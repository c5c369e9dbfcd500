#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "bellgraph/errors.hpp"
#include "bellgraph/graph.hpp"

namespace bellgraph {

namespace {

using Mask = std::uint64_t;

Mask bit(int v) { return Mask{1} << v; }

std::vector<Mask> neighbor_masks(const WeightedGraph& g, const char* who) {
  if (g.n() > kMaxBitsetVertices) {
    throw ResourceError(std::string(who) + ": graph has " + std::to_string(g.n()) +
                        " vertices, limit is " + std::to_string(kMaxBitsetVertices));
  }
  std::vector<Mask> nbr(g.n(), 0);
  for (auto [i, j] : g.edges()) {
    nbr[i] |= bit(j);
    nbr[j] |= bit(i);
  }
  return nbr;
}

class StableSearch {
 public:
  StableSearch(const std::vector<Mask>& nbr, const std::vector<double>& w) : nbr_(nbr), w_(w) {}

  Mask run(Mask all) {
    dfs(0, 0.0, all);
    return best_set_;
  }

 private:
  // Greedy clique cover of cand; each clique contributes its heaviest vertex.
  double cover_bound(Mask cand) const {
    double total = 0.0;
    while (cand) {
      int v = std::countr_zero(cand);
      Mask clique = bit(v);
      double heaviest = w_[v];
      Mask rest = cand & nbr_[v];
      while (rest) {
        int u = std::countr_zero(rest);
        clique |= bit(u);
        heaviest = std::max(heaviest, w_[u]);
        rest &= nbr_[u];
      }
      cand &= ~clique;
      total += heaviest;
    }
    return total;
  }

  double slack() const { return 1e-12 * std::max(1.0, std::abs(best_)); }

  void dfs(Mask cur, double value, Mask cand) {
    if (!cand) {
      if (value > best_ + slack()) {
        best_ = value;
        best_set_ = cur;
      }
      return;
    }
    if (value + cover_bound(cand) <= best_ + slack()) return;
    int v = std::countr_zero(cand);
    dfs(cur | bit(v), value + w_[v], cand & ~nbr_[v] & ~bit(v));
    dfs(cur, value, cand & ~bit(v));
  }

  const std::vector<Mask>& nbr_;
  const std::vector<double>& w_;
  double best_ = -1.0;
  Mask best_set_ = 0;
};

void bron_kerbosch(const std::vector<Mask>& nbr, Mask r, Mask p, Mask x,
                   std::vector<Mask>& out, std::size_t limit) {
  if (!p && !x) {
    if (out.size() >= limit) {
      throw ResourceError("maximal_cliques: more than " + std::to_string(limit) + " cliques");
    }
    out.push_back(r);
    return;
  }
  // Tomita pivot: the vertex of P u X with most neighbors in P.
  Mask px = p | x;
  int pivot = std::countr_zero(px);
  int best = -1;
  for (Mask s = px; s; s &= s - 1) {
    int u = std::countr_zero(s);
    int c = std::popcount(p & nbr[u]);
    if (c > best) {
      best = c;
      pivot = u;
    }
  }
  for (Mask s = p & ~nbr[pivot]; s; s &= s - 1) {
    int v = std::countr_zero(s);
    bron_kerbosch(nbr, r | bit(v), p & nbr[v], x & nbr[v], out, limit);
    p &= ~bit(v);
    x |= bit(v);
  }
}

}  // namespace

StableSet independence_number(const WeightedGraph& g) {
  auto nbr = neighbor_masks(g, "independence_number");
  StableSet result;
  if (g.n() == 0) return result;
  Mask all = g.n() == 64 ? ~Mask{0} : bit(g.n()) - 1;
  StableSearch search(nbr, g.weights());
  Mask best = search.run(all);
  for (int v = 0; v < g.n(); ++v) {
    if (best & bit(v)) {
      result.vertices.push_back(v);
      result.value += g.weight(v);
    }
  }
  return result;
}

CliqueCover maximal_cliques(const WeightedGraph& g, std::size_t limit) {
  auto nbr = neighbor_masks(g, "maximal_cliques");
  CliqueCover cover;
  if (g.n() == 0) return cover;
  Mask all = g.n() == 64 ? ~Mask{0} : bit(g.n()) - 1;
  std::vector<Mask> found;
  bron_kerbosch(nbr, 0, all, 0, found, limit);
  for (Mask m : found) {
    std::vector<int> c;
    for (Mask s = m; s; s &= s - 1) c.push_back(std::countr_zero(s));
    cover.cliques.push_back(std::move(c));
  }
  std::sort(cover.cliques.begin(), cover.cliques.end());
  return cover;
}

LpResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c, double tol) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw InputError("simplex_max: row count mismatch");
  for (const auto& row : A) {
    if (row.size() != n) throw InputError("simplex_max: column count mismatch");
  }
  for (double bi : b) {
    if (bi < 0.0) throw InputError("simplex_max: right-hand side must be nonnegative");
  }

  // Tableau columns: n structural, m slack, then the right-hand side.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> T(m, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  std::vector<double> reduced(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) reduced[j] = c[j];

  bool optimal = false;
  for (std::size_t iter = 0; iter < 100000 && !optimal; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (reduced[j] > tol) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) {
      optimal = true;
      break;
    }

    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] > tol) {
        double ratio = T[i][cols - 1] / T[i][enter];
        if (leave == m || ratio < best_ratio - tol ||
            (ratio <= best_ratio + tol && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == m) throw InputError("simplex_max: unbounded objective");

    double piv = T[leave][enter];
    for (double& v : T[leave]) v /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || T[i][enter] == 0.0) continue;
      double f = T[i][enter];
      for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[leave][j];
    }
    double f = reduced[enter];
    for (std::size_t j = 0; j < n + m; ++j) reduced[j] -= f * T[leave][j];
    basis[leave] = enter;
  }

  if (!optimal) throw ResourceError("simplex_max: iteration limit reached");

  LpResult result;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) result.x[basis[i]] = T[i][cols - 1];
  }
  for (std::size_t j = 0; j < n; ++j) result.value += c[j] * result.x[j];
  return result;
}

double fractional_packing(const WeightedGraph& g, const PackingOptions& options) {
  CliqueCover cover = maximal_cliques(g, options.clique_limit);
  std::vector<std::vector<double>> A;
  A.reserve(cover.cliques.size());
  for (const auto& clique : cover.cliques) {
    std::vector<double> row(g.n(), 0.0);
    for (int v : clique) row[v] = 1.0;
    A.push_back(std::move(row));
  }
  std::vector<double> b(A.size(), 1.0);
  return simplex_max(A, b, g.weights(), options.tol).value;
}

}  // namespace bellgraph
