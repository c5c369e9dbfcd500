#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace bellgraph {

using Edge = std::pair<int, int>;

// Vertex-weighted simple undirected graph. Edges are stored as (i, j) with
// i < j in ascending order, so equality is label-sensitive.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(int n);
  WeightedGraph(int n, std::vector<Edge> edges, std::vector<double> weights = {});

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int v) const { return weights_[v]; }

  bool adjacent(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  int degree(int v) const;
  std::vector<int> neighbors(int v) const;

  WeightedGraph with_weights(std::vector<double> weights) const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.weights_ == b.weights_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<std::uint8_t> adj_;
};

struct CliqueCover {
  std::vector<std::vector<int>> cliques;
};

struct StableSet {
  double value = 0.0;
  std::vector<int> vertices;
};

WeightedGraph circulant(int n, const std::vector<int>& offsets);
WeightedGraph mobius_ladder(int N);
WeightedGraph complete_graph(int n);
WeightedGraph empty_graph(int n);
WeightedGraph complement(const WeightedGraph& g);

// Bitset algorithms below require n <= 64.
constexpr int kMaxBitsetVertices = 64;

// Exact weighted independence number. Among optimal sets the witness is the
// first one in include-first order over vertices 0, 1, ..., which for
// positive weights is the lexicographically smallest sorted vertex list.
StableSet independence_number(const WeightedGraph& g);

bool is_stable(const WeightedGraph& g, const std::vector<int>& vertices);
bool is_clique(const WeightedGraph& g, const std::vector<int>& vertices);

struct PackingOptions {
  std::size_t clique_limit = 100000;
  double tol = 1e-9;
};

CliqueCover maximal_cliques(const WeightedGraph& g, std::size_t limit = 100000);
double fractional_packing(const WeightedGraph& g, const PackingOptions& options = {});

// Maximizes c^T x subject to A x <= b, x >= 0 with b >= 0, by the primal
// simplex method with Bland's rule. Throws InputError if unbounded.
struct LpResult {
  double value = 0.0;
  std::vector<double> x;
};
LpResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c, double tol = 1e-9);

constexpr int kMaxAutomorphismVertices = 32;

// Ignores weights. Throws ResourceError above kMaxAutomorphismVertices.
bool is_vertex_transitive(const WeightedGraph& g);

// Returns p with g.adjacent(i, j) == h.adjacent(p[i], p[j]) and equal weights,
// or nullopt if the graphs are not isomorphic.
std::optional<std::vector<int>> find_isomorphism(const WeightedGraph& g, const WeightedGraph& h,
                                                 bool respect_weights = true);

WeightedGraph relabel(const WeightedGraph& g, const std::vector<int>& perm);

}  // namespace bellgraph
