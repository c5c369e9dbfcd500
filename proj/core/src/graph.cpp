#include "bellgraph/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "bellgraph/errors.hpp"

namespace bellgraph {

WeightedGraph::WeightedGraph(int n) : WeightedGraph(n, {}, {}) {}

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges, std::vector<double> weights)
    : n_(n), weights_(std::move(weights)) {
  if (n < 0) throw InputError("graph: negative vertex count");
  if (weights_.empty()) weights_.assign(n, 1.0);
  if (static_cast<int>(weights_.size()) != n) {
    throw InputError("graph: expected " + std::to_string(n) + " weights, got " +
                     std::to_string(weights_.size()));
  }
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InputError("graph: weights must be nonnegative");
  }
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
  edges_.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw InputError("graph: edge (" + std::to_string(i) + "," + std::to_string(j) +
                       ") out of range");
    }
    if (i == j) throw InputError("graph: self-loop at vertex " + std::to_string(i));
    if (i > j) std::swap(i, j);
    if (adjacent(i, j)) {
      throw InputError("graph: duplicate edge (" + std::to_string(i) + "," + std::to_string(j) +
                       ")");
    }
    adj_[static_cast<std::size_t>(i) * n + j] = 1;
    adj_[static_cast<std::size_t>(j) * n + i] = 1;
    edges_.emplace_back(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
}

int WeightedGraph::degree(int v) const {
  int d = 0;
  for (int u = 0; u < n_; ++u) d += adjacent(v, u) ? 1 : 0;
  return d;
}

std::vector<int> WeightedGraph::neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < n_; ++u) {
    if (adjacent(v, u)) out.push_back(u);
  }
  return out;
}

WeightedGraph WeightedGraph::with_weights(std::vector<double> weights) const {
  return WeightedGraph(n_, edges_, std::move(weights));
}

WeightedGraph circulant(int n, const std::vector<int>& offsets) {
  if (n < 3) throw InputError("circulant: n must be at least 3");
  if (offsets.empty()) throw InputError("circulant: offsets must be nonempty");
  std::set<int> seen;
  for (int l : offsets) {
    if (l < 1 || l > n / 2) {
      throw InputError("circulant: offset " + std::to_string(l) + " outside [1, " +
                       std::to_string(n / 2) + "]");
    }
    if (!seen.insert(l).second) throw InputError("circulant: duplicate offset " + std::to_string(l));
  }
  std::set<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int l : offsets) {
      int j = (i + l) % n;
      edges.emplace(std::min(i, j), std::max(i, j));
    }
  }
  return WeightedGraph(n, {edges.begin(), edges.end()});
}

WeightedGraph mobius_ladder(int N) {
  if (N < 2) throw InputError("mobius_ladder: N must be at least 2");
  return circulant(4 * N, {1, 2 * N});
}

WeightedGraph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph empty_graph(int n) { return WeightedGraph(n); }

WeightedGraph complement(const WeightedGraph& g) {
  std::vector<Edge> edges;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = i + 1; j < g.n(); ++j) {
      if (!g.adjacent(i, j)) edges.emplace_back(i, j);
    }
  }
  return WeightedGraph(g.n(), std::move(edges), g.weights());
}

WeightedGraph relabel(const WeightedGraph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n()) throw InputError("relabel: permutation size mismatch");
  std::vector<int> check(perm);
  std::sort(check.begin(), check.end());
  for (int i = 0; i < g.n(); ++i) {
    if (check[i] != i) throw InputError("relabel: not a permutation");
  }
  std::vector<Edge> edges;
  for (auto [i, j] : g.edges()) edges.emplace_back(perm[i], perm[j]);
  std::vector<double> w(g.n());
  for (int i = 0; i < g.n(); ++i) w[perm[i]] = g.weight(i);
  return WeightedGraph(g.n(), std::move(edges), std::move(w));
}

bool is_stable(const WeightedGraph& g, const std::vector<int>& vertices) {
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (vertices[a] == vertices[b] || g.adjacent(vertices[a], vertices[b])) return false;
    }
  }
  return true;
}

bool is_clique(const WeightedGraph& g, const std::vector<int>& vertices) {
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (!g.adjacent(vertices[a], vertices[b])) return false;
    }
  }
  return true;
}

}  // namespace bellgraph
