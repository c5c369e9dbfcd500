#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

#include "bellgraph/errors.hpp"
#include "bellgraph/graph.hpp"

namespace bellgraph {

namespace {

// Degree followed by the sorted neighbor degrees; preserved by isomorphisms.
std::vector<std::vector<int>> vertex_invariants(const WeightedGraph& g) {
  std::vector<std::vector<int>> inv(g.n());
  for (int v = 0; v < g.n(); ++v) {
    inv[v].push_back(g.degree(v));
    std::vector<int> nd;
    for (int u : g.neighbors(v)) nd.push_back(g.degree(u));
    std::sort(nd.begin(), nd.end());
    inv[v].insert(inv[v].end(), nd.begin(), nd.end());
  }
  return inv;
}

// Breadth-first order so that most vertices have an already placed neighbor.
std::vector<int> search_order(const WeightedGraph& g) {
  std::vector<int> order;
  std::vector<char> seen(g.n(), 0);
  for (int s = 0; s < g.n(); ++s) {
    if (seen[s]) continue;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (int u : g.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = 1;
          q.push(u);
        }
      }
    }
  }
  return order;
}

class Matcher {
 public:
  Matcher(const WeightedGraph& g, const WeightedGraph& h, bool respect_weights)
      : g_(g),
        h_(h),
        respect_weights_(respect_weights),
        inv_g_(vertex_invariants(g)),
        inv_h_(vertex_invariants(h)),
        order_(search_order(g)),
        map_(g.n(), -1),
        used_(h.n(), 0) {}

  // Searches for a map with order_[0] -> target (or any target if -1).
  std::optional<std::vector<int>> find(int first_target) {
    if (g_.n() != h_.n() || g_.edges().size() != h_.edges().size()) return std::nullopt;
    if (g_.n() == 0) return std::vector<int>{};
    first_target_ = first_target;
    std::fill(map_.begin(), map_.end(), -1);
    std::fill(used_.begin(), used_.end(), 0);
    if (extend(0)) return map_;
    return std::nullopt;
  }

  const std::vector<int>& order() const { return order_; }

 private:
  bool compatible(int v, int t) const {
    if (used_[t] || inv_g_[v] != inv_h_[t]) return false;
    if (respect_weights_ && g_.weight(v) != h_.weight(t)) return false;
    for (int d = 0; d < depth_; ++d) {
      int u = order_[d];
      if (g_.adjacent(v, u) != h_.adjacent(t, map_[u])) return false;
    }
    return true;
  }

  bool extend(int depth) {
    if (depth == g_.n()) return true;
    int v = order_[depth];
    for (int t = 0; t < h_.n(); ++t) {
      if (depth == 0 && first_target_ >= 0 && t != first_target_) continue;
      depth_ = depth;
      if (!compatible(v, t)) continue;
      map_[v] = t;
      used_[t] = 1;
      if (extend(depth + 1)) return true;
      map_[v] = -1;
      used_[t] = 0;
    }
    return false;
  }

  const WeightedGraph& g_;
  const WeightedGraph& h_;
  bool respect_weights_;
  std::vector<std::vector<int>> inv_g_;
  std::vector<std::vector<int>> inv_h_;
  std::vector<int> order_;
  std::vector<int> map_;
  std::vector<char> used_;
  int depth_ = 0;
  int first_target_ = -1;
};

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

std::optional<std::vector<int>> find_isomorphism(const WeightedGraph& g, const WeightedGraph& h,
                                                 bool respect_weights) {
  Matcher m(g, h, respect_weights);
  return m.find(-1);
}

bool is_vertex_transitive(const WeightedGraph& g) {
  if (g.n() > kMaxAutomorphismVertices) {
    throw ResourceError("is_vertex_transitive: graph has " + std::to_string(g.n()) +
                        " vertices, limit is " + std::to_string(kMaxAutomorphismVertices));
  }
  if (g.n() <= 1) return true;
  Matcher m(g, g, false);
  const int anchor = m.order()[0];
  std::vector<int> parent(g.n());
  std::iota(parent.begin(), parent.end(), 0);
  for (int target = 0; target < g.n(); ++target) {
    if (find_root(parent, target) == find_root(parent, anchor)) continue;
    auto sigma = m.find(target);
    if (!sigma) return false;
    // Every automorphism found merges the orbits it connects.
    for (int v = 0; v < g.n(); ++v) {
      int a = find_root(parent, v);
      int b = find_root(parent, (*sigma)[v]);
      if (a != b) parent[a] = b;
    }
  }
  return true;
}

}  // namespace bellgraph
