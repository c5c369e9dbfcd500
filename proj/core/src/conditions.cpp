#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "bellgraph/errors.hpp"
#include "bellgraph/selftest.hpp"

namespace bellgraph {

Eigen::VectorXd ProductStructure::event_vector(int i) const {
  Eigen::VectorXd v = local[0][index[i][0]];
  for (int p = 1; p < party_count; ++p) v = kron(v, local[p][index[i][p]]);
  return signs[i] * v;
}

int ProductStructure::find_label(int party, LocalLabel l) const {
  const auto& ls = labels[party];
  auto it = std::lower_bound(ls.begin(), ls.end(), l);
  if (it == ls.end() || *it != l) return -1;
  return static_cast<int>(it - ls.begin());
}

namespace {

Eigen::VectorXd rank_one_vector(const Realization& r, int p, int x, int a) {
  if (r.rank_one()) return r.vectors[p][x][a];
  const Eigen::MatrixXd& P = r.projectors[p][x][a];
  if (std::abs(P.trace() - 1.0) > 1e-8) {
    throw PreconditionError("projector of party " + std::to_string(p) + " setting " +
                            std::to_string(x) + " outcome " + std::to_string(a) +
                            " does not have rank one");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  Eigen::VectorXd v = es.eigenvectors().col(P.rows() - 1);
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      break;
    }
  }
  return v;
}

int matrix_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  int r = 0;
  for (int k = 0; k < s.size(); ++k) r += s(k) > tol ? 1 : 0;
  return r;
}

Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& vs, const std::vector<int>& idx) {
  Eigen::MatrixXd m(vs.empty() ? 0 : vs[0].size(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = vs[idx[c]];
  return m;
}

bool spans(const std::vector<Eigen::VectorXd>& vs, const std::vector<int>& idx, int dim,
           double tol) {
  return static_cast<int>(idx.size()) >= dim && matrix_rank(stack(vs, idx), tol) == dim;
}

bool connected(int n, const std::vector<Edge>& edges) {
  if (n == 0) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  int comps = n;
  for (auto [u, v] : edges) {
    const int a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps == 1;
}

// Visits k-subsets of items in lexicographic order until f returns true.
bool for_each_subset(const std::vector<int>& items, int k, const std::function<bool(const std::vector<int>&)>& f) {
  const int n = static_cast<int>(items.size());
  if (k > n || k < 0) return false;
  std::vector<int> pos(k);
  std::iota(pos.begin(), pos.end(), 0);
  std::vector<int> sub(k);
  while (true) {
    for (int t = 0; t < k; ++t) sub[t] = items[pos[t]];
    if (f(sub)) return true;
    int t = k - 1;
    while (t >= 0 && pos[t] == n - k + t) --t;
    if (t < 0) return false;
    ++pos[t];
    for (int u = t + 1; u < k; ++u) pos[u] = pos[u - 1] + 1;
  }
}

std::vector<int> range(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<std::pair<int, int>> event_pairs(const ProductStructure& ps, int inner, int outer) {
  std::set<std::pair<int, int>> s;
  for (const auto& idx : ps.index) s.emplace(idx[inner], idx[outer]);
  return {s.begin(), s.end()};
}

// B4 edges for a fixed choice of I_B and I_{A,i_B}.
std::vector<Edge> b4_edges(const ProductStructure& ps, const A2Evidence& ev, double tol) {
  std::vector<Edge> edges;
  const auto& b = ps.local[ev.outer_party];
  for (std::size_t u = 0; u < ev.outer.size(); ++u) {
    for (std::size_t v = u + 1; v < ev.outer.size(); ++v) {
      if (std::abs(b[ev.outer[u]].dot(b[ev.outer[v]])) <= tol) continue;
      std::vector<int> common;
      std::set_intersection(ev.inner[u].begin(), ev.inner[u].end(), ev.inner[v].begin(),
                            ev.inner[v].end(), std::back_inserter(common));
      if (!common.empty()) edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
  }
  return edges;
}

std::optional<A2Evidence> a2_search(const ProductStructure& ps, int inner, int outer,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    const ConditionOptions& o) {
  const int din = ps.dims[inner];
  const int dout = ps.dims[outer];
  const auto& a = ps.local[inner];
  const auto& b = ps.local[outer];
  std::vector<int> outer_items;
  for (const auto& pr : pairs) outer_items.push_back(pr.second);
  std::sort(outer_items.begin(), outer_items.end());
  outer_items.erase(std::unique(outer_items.begin(), outer_items.end()), outer_items.end());

  std::optional<A2Evidence> found;
  for_each_subset(outer_items, dout, [&](const std::vector<int>& ib) {
    if (!spans(b, ib, dout, o.rank_tol)) return false;
    // Spanning choices of I_{A,i_B} for each i_B.
    std::vector<std::vector<std::vector<int>>> options(ib.size());
    for (std::size_t t = 0; t < ib.size(); ++t) {
      std::vector<int> avail;
      for (const auto& pr : pairs) {
        if (pr.second == ib[t]) avail.push_back(pr.first);
      }
      for_each_subset(avail, din, [&](const std::vector<int>& ia) {
        if (spans(a, ia, din, o.rank_tol)) options[t].push_back(ia);
        return false;
      });
      if (options[t].empty()) return false;
    }
    A2Evidence ev;
    ev.inner_party = inner;
    ev.outer_party = outer;
    ev.outer = ib;
    ev.inner.resize(ib.size());
    std::vector<std::size_t> choice(ib.size(), 0);
    while (true) {
      for (std::size_t t = 0; t < ib.size(); ++t) ev.inner[t] = options[t][choice[t]];
      ev.edges = b4_edges(ps, ev, o.overlap_tol);
      if (connected(static_cast<int>(ib.size()), ev.edges)) {
        found = ev;
        return true;
      }
      int t = static_cast<int>(ib.size()) - 1;
      while (t >= 0 && choice[t] + 1 == options[t].size()) choice[t--] = 0;
      if (t < 0) return false;
      ++choice[t];
    }
  });
  return found;
}

// Each local index gets one orthogonal partner, preferring its own setting.
std::optional<std::vector<std::array<int, 2>>> orthogonal_pairing(const ProductStructure& ps, int p,
                                                                 double tol) {
  const auto& vs = ps.local[p];
  const int n = static_cast<int>(vs.size());
  std::vector<int> partner(n, -1);
  for (int k = 0; k < n; ++k) {
    if (partner[k] >= 0) continue;
    int best = -1;
    for (int l = k + 1; l < n; ++l) {
      if (partner[l] >= 0 || std::abs(vs[k].dot(vs[l])) > tol) continue;
      if (best < 0 || (ps.labels[p][l].setting == ps.labels[p][k].setting &&
                       ps.labels[p][best].setting != ps.labels[p][k].setting)) {
        best = l;
      }
    }
    if (best < 0) return std::nullopt;
    partner[k] = best;
    partner[best] = k;
  }
  std::vector<std::array<int, 2>> out;
  for (int k = 0; k < n; ++k) {
    if (k < partner[k]) out.push_back({k, partner[k]});
  }
  return out;
}

void pairing_conditions(const ProductStructure& ps, const ConditionOptions& o,
                        ConditionReport& rep, const std::string& dim_name,
                        const std::string& pair_name) {
  bool qubits = true;
  for (int d : ps.dims) qubits = qubits && d == 2;
  rep.verdicts[dim_name] = {qubits, qubits ? "" : "some local dimension differs from 2"};

  bool ok = true;
  std::string reason;
  rep.pairings.assign(ps.party_count, {});
  for (int p = 0; p < ps.party_count; ++p) {
    auto pr = orthogonal_pairing(ps, p, o.overlap_tol);
    if (pr) rep.pairings[p] = *pr;
    if (ok && ps.local[p].size() != 4) {
      ok = false;
      reason = "party " + std::to_string(p) + " has " + std::to_string(ps.local[p].size()) +
               " local indices, expected 4";
    } else if (ok && !pr) {
      ok = false;
      reason = "party " + std::to_string(p) + " has a local index without orthogonal partner";
    }
  }
  if (!ok) {
    for (auto& pp : rep.pairings) pp.clear();
  }
  rep.verdicts[pair_name] = {ok, reason};
}

int event_span_rank(const ProductStructure& ps, double tol) {
  Eigen::MatrixXd m(ps.state.size(), ps.events());
  for (int i = 0; i < ps.events(); ++i) m.col(i) = ps.event_vector(i);
  return matrix_rank(m, tol);
}

// Orients a linked triple as (i, j, k) with j, k sharing A, i, j sharing C
// and i, k sharing B. Returns false when the triple is not linked.
bool orient_linked(const ProductStructure& ps, int i, int j, int k, double tol,
                   std::array<int, 3>& out) {
  if (i == j || j == k || i == k) return false;
  const std::array<int, 3> e = {i, j, k};
  for (int x = 0; x < 3; ++x) {
    for (int y = x + 1; y < 3; ++y) {
      if (std::abs(ps.event_vector(e[x]).dot(ps.event_vector(e[y]))) <= tol) return false;
    }
  }
  auto shared = [&](int u, int v) {
    int party = -1, count = 0;
    for (int p = 0; p < 3; ++p) {
      if (ps.index[u][p] == ps.index[v][p]) {
        party = p;
        ++count;
      }
    }
    return count == 1 ? party : -1;
  };
  std::array<int, 3> perm = {0, 1, 2};
  do {
    const int a = e[perm[0]], b = e[perm[1]], c = e[perm[2]];
    if (shared(b, c) == 0 && shared(a, b) == 2 && shared(a, c) == 1) {
      out = {a, b, c};
      return true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

ProductStructure product_structure(const BellWitness& wit, const Realization& r) {
  wit.validate();
  r.validate();
  r.check_compatible(wit.scenario);
  const int n = r.parties();
  if (n != 2 && n != 3) throw PreconditionError("product structure needs two or three parties");
  ProductStructure ps;
  ps.party_count = n;
  ps.dims = r.dims;
  ps.state = r.state;
  ps.labels.resize(n);
  ps.local.resize(n);
  for (int p = 0; p < n; ++p) {
    std::set<LocalLabel> used;
    for (const WitnessTerm& t : wit.terms) used.insert({t.event.x[p], t.event.a[p]});
    ps.labels[p].assign(used.begin(), used.end());
    for (const LocalLabel& l : ps.labels[p]) ps.local[p].push_back(rank_one_vector(r, p, l.setting, l.outcome));
  }
  for (const WitnessTerm& t : wit.terms) {
    std::vector<int> idx(n);
    for (int p = 0; p < n; ++p) idx[p] = ps.find_label(p, {t.event.x[p], t.event.a[p]});
    ps.index.push_back(idx);
    Eigen::VectorXd prod = ps.local[0][idx[0]];
    for (int p = 1; p < n; ++p) prod = kron(prod, ps.local[p][idx[p]]);
    const double c = prod.dot(r.state);
    if (std::abs(c) < kMinEta) {
      throw PreconditionError("event " + std::to_string(ps.index.size() - 1) +
                              " has vanishing weight on the state (eta < 1e-10)");
    }
    ps.etas.push_back(std::abs(c));
    ps.signs.push_back(c > 0.0 ? 1.0 : -1.0);
  }
  return ps;
}

bool linked(const ProductStructure& ps, int i, int j, int k, double overlap_tol) {
  if (ps.party_count != 3) return false;
  std::array<int, 3> out;
  return orient_linked(ps, i, j, k, overlap_tol, out);
}

bool check_a2_evidence(const ProductStructure& ps, A2Evidence& ev,
                       const std::vector<std::pair<int, int>>& pairs, const ConditionOptions& o) {
  const int din = ps.dims[ev.inner_party];
  const int dout = ps.dims[ev.outer_party];
  if (static_cast<int>(ev.outer.size()) != dout || ev.inner.size() != ev.outer.size()) return false;
  if (!spans(ps.local[ev.outer_party], ev.outer, dout, o.rank_tol)) return false;
  const std::set<std::pair<int, int>> avail(pairs.begin(), pairs.end());
  for (std::size_t t = 0; t < ev.outer.size(); ++t) {
    if (static_cast<int>(ev.inner[t].size()) != din) return false;
    for (int k : ev.inner[t]) {
      if (!avail.count({k, ev.outer[t]})) return false;
    }
    if (!spans(ps.local[ev.inner_party], ev.inner[t], din, o.rank_tol)) return false;
  }
  ev.edges = b4_edges(ps, ev, o.overlap_tol);
  return connected(dout, ev.edges);
}

A6Evidence evaluate_a6(const ProductStructure& ps, const std::vector<int>& ia,
                       const ConditionOptions& o) {
  A6Evidence ev;
  ev.ia = ia;
  ev.ibc.resize(ia.size());
  const int dbc = ps.dims[1] * ps.dims[2];
  std::vector<Eigen::VectorXd> bc;
  std::vector<int> all_bc;
  std::map<std::pair<int, int>, int> bc_index;
  bool per_element = true;
  for (std::size_t t = 0; t < ia.size(); ++t) {
    std::set<std::pair<int, int>> pairs;
    for (const auto& idx : ps.index) {
      if (idx[0] == ia[t]) pairs.emplace(idx[1], idx[2]);
    }
    ev.ibc[t].assign(pairs.begin(), pairs.end());
    std::vector<int> mine;
    for (const auto& pr : ev.ibc[t]) {
      auto [it, fresh] = bc_index.emplace(pr, static_cast<int>(bc.size()));
      if (fresh) {
        bc.push_back(kron(ps.local[1][pr.first], ps.local[2][pr.second]));
        all_bc.push_back(it->second);
      }
      mine.push_back(it->second);
    }
    per_element = per_element && spans(bc, mine, dbc, o.rank_tol);
  }
  ev.per_element_span = per_element && !ia.empty();
  ev.union_span = spans(bc, all_bc, dbc, o.rank_tol);

  // G_A edges from linked triples over all events.
  std::set<Edge> edges;
  std::map<Edge, std::array<int, 3>> witness;
  const int n = ps.events();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        std::array<int, 3> tri;
        if (!orient_linked(ps, i, j, k, o.overlap_tol, tri)) continue;
        auto u = std::find(ia.begin(), ia.end(), ps.index[tri[0]][0]);
        auto v = std::find(ia.begin(), ia.end(), ps.index[tri[1]][0]);
        if (u == ia.end() || v == ia.end()) continue;
        int pu = static_cast<int>(u - ia.begin()), pv = static_cast<int>(v - ia.begin());
        Edge e{std::min(pu, pv), std::max(pu, pv)};
        if (edges.insert(e).second) witness[e] = tri;
      }
    }
  }
  ev.edges.assign(edges.begin(), edges.end());
  for (const Edge& e : ev.edges) ev.linked.push_back(witness[e]);
  ev.connected = connected(static_cast<int>(ia.size()), ev.edges);
  return ev;
}

ConditionReport check_bipartite_conditions(const ProductStructure& ps, const ConditionOptions& o) {
  if (ps.party_count != 2) throw InputError("check_bipartite_conditions: needs two parties");
  ConditionReport rep;
  rep.party_count = 2;
  rep.span_rank = event_span_rank(ps, o.rank_tol);
  const int full = ps.dims[0] * ps.dims[1];
  rep.verdicts["A1"] = {rep.span_rank == full,
                        rep.span_rank == full ? ""
                                              : "event vectors span dimension " +
                                                    std::to_string(rep.span_rank) + " of " +
                                                    std::to_string(full)};
  rep.a2 = a2_search(ps, 0, 1, event_pairs(ps, 0, 1), o);
  rep.verdicts["A2"] = {rep.a2.has_value(),
                        rep.a2 ? "" : "no I_B and I_A,iB satisfy B1-B4"};
  pairing_conditions(ps, o, rep, "A3", "A4");
  return rep;
}

ConditionReport check_tripartite_conditions(const ProductStructure& ps, const ConditionOptions& o) {
  if (ps.party_count != 3) throw InputError("check_tripartite_conditions: needs three parties");
  ConditionReport rep;
  rep.party_count = 3;
  rep.span_rank = event_span_rank(ps, o.rank_tol);
  const int full = ps.dims[0] * ps.dims[1] * ps.dims[2];
  rep.verdicts["A5"] = {rep.span_rank == full,
                        rep.span_rank == full ? ""
                                              : "event vectors span dimension " +
                                                    std::to_string(rep.span_rank) + " of " +
                                                    std::to_string(full)};

  // Literal A6 needs every I_BC,iA to span; the relaxed form asks for the union.
  std::optional<A6Evidence> literal, relaxed;
  for_each_subset(range(static_cast<int>(ps.local[0].size())), ps.dims[0],
                  [&](const std::vector<int>& ia) {
                    if (!spans(ps.local[0], ia, ps.dims[0], o.rank_tol)) return false;
                    A6Evidence ev = evaluate_a6(ps, ia, o);
                    if (!ev.connected || !ev.union_span) return false;
                    if (!relaxed) relaxed = ev;
                    if (ev.per_element_span) {
                      literal = ev;
                      return true;
                    }
                    return false;
                  });
  rep.a6 = literal ? literal : relaxed;
  rep.verdicts["A6"] = {literal.has_value(),
                        literal ? ""
                                : "no I_A with connected G_A where every I_BC,iA spans H_B (x) H_C"};
  rep.verdicts["A6-relaxed"] = {rep.a6.has_value(),
                                rep.a6 ? "" : "no I_A with connected G_A whose I_BC union spans H_B (x) H_C"};

  if (rep.a6) {
    std::set<std::pair<int, int>> pairs;
    for (const auto& set : rep.a6->ibc) {
      for (auto [b, c] : set) pairs.emplace(c, b);
    }
    rep.a2 = a2_search(ps, 2, 1, {pairs.begin(), pairs.end()}, o);
    rep.verdicts["A7"] = {rep.a2.has_value(), rep.a2 ? "" : "no I_B and I_C,iB satisfy B1-B4"};
  } else {
    rep.verdicts["A7"] = {false, "no I_A to draw the B/C pairs from"};
  }
  pairing_conditions(ps, o, rep, "A8", "A9");
  return rep;
}

ConditionReport check_conditions(const ProductStructure& ps, const ConditionOptions& o) {
  return ps.party_count == 2 ? check_bipartite_conditions(ps, o) : check_tripartite_conditions(ps, o);
}

bool ConditionReport::holds(const std::string& c) const {
  auto it = verdicts.find(c);
  return it != verdicts.end() && it->second.holds;
}

namespace {

std::vector<std::string> gate(int parties, bool general) {
  std::vector<std::string> g = parties == 2 ? std::vector<std::string>{"A1", "A2"}
                                            : std::vector<std::string>{"A6-relaxed", "A7"};
  if (general) {
    if (parties == 2) {
      g.insert(g.end(), {"A3", "A4"});
    } else {
      g.insert(g.end(), {"A8", "A9"});
    }
  }
  return g;
}

}  // namespace

bool ConditionReport::rank_one_ready() const { return first_failure(false).empty(); }

bool ConditionReport::general_ready() const { return first_failure(true).empty(); }

std::string ConditionReport::first_failure(bool general) const {
  for (const std::string& c : gate(party_count, general)) {
    if (!holds(c)) return c;
  }
  return "";
}

bool validate_evidence(const ProductStructure& ps, const ConditionReport& report,
                       const ConditionOptions& o) {
  const ConditionReport fresh = check_conditions(ps, o);
  if (fresh.span_rank != report.span_rank) return false;
  for (const auto& [name, v] : fresh.verdicts) {
    if (report.holds(name) != v.holds) return false;
  }
  if (report.a2.has_value() != report.holds(ps.party_count == 2 ? "A2" : "A7")) return false;
  if (report.a2) {
    A2Evidence ev = *report.a2;
    std::vector<std::pair<int, int>> pairs;
    if (ps.party_count == 2) {
      pairs = event_pairs(ps, 0, 1);
    } else {
      if (!report.a6) return false;
      std::set<std::pair<int, int>> s;
      for (const auto& set : report.a6->ibc) {
        for (auto [b, c] : set) s.emplace(c, b);
      }
      pairs.assign(s.begin(), s.end());
    }
    if (!check_a2_evidence(ps, ev, pairs, o) || ev.edges != report.a2->edges) return false;
  }
  if (ps.party_count == 3) {
    if (report.a6.has_value() != report.holds("A6-relaxed")) return false;
    if (report.a6) {
      const A6Evidence ev = evaluate_a6(ps, report.a6->ia, o);
      if (ev.edges != report.a6->edges || ev.ibc != report.a6->ibc ||
          ev.per_element_span != report.a6->per_element_span ||
          ev.union_span != report.a6->union_span || ev.connected != report.a6->connected) {
        return false;
      }
      if (!spans(ps.local[0], ev.ia, ps.dims[0], o.rank_tol) || !ev.connected || !ev.union_span) {
        return false;
      }
      if (report.holds("A6") != ev.per_element_span) return false;
      for (std::size_t e = 0; e < report.a6->linked.size(); ++e) {
        const auto& t = report.a6->linked[e];
        if (!linked(ps, t[0], t[1], t[2], o.overlap_tol)) return false;
      }
    }
  }
  const bool paired = report.holds(ps.party_count == 2 ? "A4" : "A9");
  for (int p = 0; p < ps.party_count && p < static_cast<int>(report.pairings.size()); ++p) {
    std::set<int> seen;
    for (const auto& pr : report.pairings[p]) {
      if (std::abs(ps.local[p][pr[0]].dot(ps.local[p][pr[1]])) > o.overlap_tol) return false;
      seen.insert(pr[0]);
      seen.insert(pr[1]);
    }
    if (paired && seen.size() != ps.local[p].size()) return false;
  }
  return true;
}

bool check_projector_condition_C1(const Realization& cand, const ProductStructure& ref,
                                  const ConditionReport& report, double tol) {
  if (cand.parties() != ref.party_count ||
      static_cast<int>(report.pairings.size()) != ref.party_count) {
    throw InputError("C1: candidate and reference party counts differ");
  }
  for (int p = 0; p < ref.party_count; ++p) {
    if (report.pairings[p].empty()) return false;
    const Eigen::Index d = cand.dims[p];
    for (const auto& pr : report.pairings[p]) {
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
      for (int k : pr) {
        const LocalLabel& l = ref.labels[p][k];
        if (l.setting >= static_cast<int>(cand.projectors[p].size()) ||
            l.outcome >= static_cast<int>(cand.projectors[p][l.setting].size())) {
          throw InputError("C1: candidate lacks setting " + std::to_string(l.setting) +
                           " outcome " + std::to_string(l.outcome) + " for party " +
                           std::to_string(p));
        }
        sum += cand.projectors[p][l.setting][l.outcome];
      }
      if ((sum - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

SelfTestReference prepare_reference(const BellWitness& wit, const Realization& ref,
                                    const ConditionOptions& o) {
  SelfTestReference s;
  s.witness = wit;
  s.realization = ref;
  s.structure = product_structure(wit, ref);
  s.conditions = check_conditions(s.structure, o);
  s.gram = behavior_gram(wit, ref);
  return s;
}

SelfTestReference prepare_reference(const ScenarioId& id) {
  return prepare_reference(witness_for(id), reference_realization(id));
}

}  // namespace bellgraph
