#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "bellgraph/errors.hpp"
#include "bellgraph/selftest.hpp"
#include "selftest_detail.hpp"

namespace bellgraph {

namespace detail {

Eigen::MatrixXd fit_isometry(const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt, double tol,
                             const std::string& what) {
  // src has full row rank, so V = tgt src^+ with src^+ = src^T (src src^T)^-1.
  const Eigen::MatrixXd gram = src * src.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::MatrixXd V = ldlt.solve(src * tgt.transpose()).transpose();
  const double fit = (V * src - tgt).cwiseAbs().maxCoeff();
  if (!(fit <= tol)) {
    std::ostringstream os;
    os << what << ": inconsistent local map (fit residual " << fit << ")";
    throw NotAnOptimizer(os.str());
  }
  const double iso =
      (V.transpose() * V - Eigen::MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
  if (!(iso <= tol)) {
    std::ostringstream os;
    os << what << ": extracted map is not an isometry (deviation " << iso << ")";
    throw NotAnOptimizer(os.str());
  }
  return V;
}

bool leading_entry_negative(const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > 1e-12) return m(r, c) < 0.0;
    }
  }
  return false;
}

std::vector<std::pair<int, int>> bfs_tree(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  std::vector<std::pair<int, int>> tree;
  std::vector<bool> seen(n, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      tree.emplace_back(u, v);
      q.push(v);
    }
  }
  if (static_cast<int>(tree.size()) != n - 1) {
    throw PreconditionError("connectivity graph of the evidence is disconnected");
  }
  return tree;
}

void fill_residuals(const SelfTestReference& ref, const Realization& cand, SelfTestReport& rep) {
  const Realization& r = ref.realization;
  const int n = r.parties();
  std::vector<int> joint(n);
  for (int p = 0; p < n; ++p) joint[p] = r.dims[p] * rep.junk_dims[p];
  auto lift = [&](const Eigen::VectorXd& v) {
    return apply_local(joint, rep.isometries, interleave_ancilla(v, r.dims, rep.junk, rep.junk_dims));
  };
  rep.state_residual = (lift(r.state) - cand.state).norm();
  rep.vector_residuals.clear();
  for (const WitnessTerm& t : ref.witness.terms) {
    rep.vector_residuals.push_back((lift(apply_event(r, t.event)) - apply_event(cand, t.event)).norm());
  }
}

bool uses_rank_one_projectors(const BellWitness& wit, const Realization& cand) {
  for (const WitnessTerm& t : wit.terms) {
    for (int p = 0; p < cand.parties(); ++p) {
      if (std::abs(cand.projectors[p][t.event.x[p]][t.event.a[p]].trace() - 1.0) > 1e-8) return false;
    }
  }
  return true;
}

}  // namespace detail

void check_gram_match(const SelfTestReference& ref, const Realization& cand, double tol) {
  const SymMatrix g = behavior_gram(ref.witness, cand);
  if (g.dim() != ref.gram.dim()) throw InputError("Gram dimension mismatch");
  Eigen::Index r = 0, c = 0;
  const double dev = (g.dense() - ref.gram.dense()).cwiseAbs().maxCoeff(&r, &c);
  if (dev > tol) {
    std::ostringstream os;
    os << "Gram mismatch: candidate deviates from the reference optimizer by " << dev << " at ("
       << r << ", " << c << ")";
    throw NotAnOptimizer(os.str());
  }
}

namespace {

using detail::bfs_tree;
using detail::fit_isometry;
using detail::leading_entry_negative;

void require_gate(const SelfTestReference& ref, int parties, bool general) {
  if (ref.conditions.party_count != parties) {
    throw PreconditionError("reference has " + std::to_string(ref.conditions.party_count) +
                            " parties, this path needs " + std::to_string(parties));
  }
  const std::string f = ref.conditions.first_failure(general);
  if (!f.empty()) throw PreconditionError("condition " + f + " fails for the reference");
}

std::vector<double> event_thetas(const ProductStructure& ps, const ProductStructure& cps) {
  std::vector<double> th(ps.events());
  for (int i = 0; i < ps.events(); ++i) th[i] = ps.signs[i] * cps.signs[i];
  return th;
}

Eigen::MatrixXd columns(const std::vector<Eigen::VectorXd>& vs, const std::vector<int>& idx,
                        const std::vector<double>& scale = {}) {
  Eigen::MatrixXd m(vs[idx[0]].size(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    m.col(static_cast<Eigen::Index>(c)) = (scale.empty() ? 1.0 : scale[c]) * vs[idx[c]];
  }
  return m;
}

struct ChainResult {
  Eigen::MatrixXd inner;             // map of the inner party
  Eigen::MatrixXd outer;             // map of the outer party
  std::vector<double> outer_signs;   // rho / gamma per I_B position
};

// Propagation along the B4 tree: kappa(k, l) is the sign taking the inner
// local vector k to its candidate under the map attached to outer index l.
template <class Kappa>
ChainResult run_chain(const ProductStructure& ps, const ProductStructure& cps, const A2Evidence& ev,
                      Kappa kappa, double tol) {
  const int in = ev.inner_party, out = ev.outer_party;
  const int m = static_cast<int>(ev.outer.size());
  std::vector<Eigen::MatrixXd> maps(m);
  for (int t = 0; t < m; ++t) {
    std::vector<double> s;
    for (int k : ev.inner[t]) s.push_back(kappa(k, ev.outer[t]));
    maps[t] = fit_isometry(columns(ps.local[in], ev.inner[t]), columns(cps.local[in], ev.inner[t], s),
                           tol, "party " + std::to_string(in) + " block " + std::to_string(t));
  }
  std::vector<double> rho(m, 1.0);
  for (auto [u, v] : bfs_tree(m, ev.edges)) {
    std::vector<int> common;
    std::set_intersection(ev.inner[u].begin(), ev.inner[u].end(), ev.inner[v].begin(),
                          ev.inner[v].end(), std::back_inserter(common));
    const int k0 = common.front();
    const double tau = kappa(k0, ev.outer[u]) * kappa(k0, ev.outer[v]);
    const double dev = (maps[v] - tau * maps[u]).cwiseAbs().maxCoeff();
    if (dev > tol) {
      std::ostringstream os;
      os << "sign propagation inconsistent between outer indices " << ev.outer[u] << " and "
         << ev.outer[v] << " (deviation " << dev << ")";
      throw NotAnOptimizer(os.str());
    }
    rho[v] = rho[u] * tau;
  }
  ChainResult res;
  res.inner = maps[0];
  res.outer = fit_isometry(columns(ps.local[out], ev.outer), columns(cps.local[out], ev.outer, rho),
                           tol, "party " + std::to_string(out));
  res.outer_signs = rho;
  return res;
}

SelfTestReport rank_one_report(const std::string& path, std::vector<Eigen::MatrixXd> isos) {
  SelfTestReport rep;
  rep.path = path;
  rep.isometries = std::move(isos);
  rep.junk_dims.assign(rep.isometries.size(), 1);
  rep.junk = Eigen::VectorXd::Ones(1);
  return rep;
}

}  // namespace

SelfTestReport extract_bipartite_isometries_rank1(const SelfTestReference& ref,
                                                  const Realization& cand,
                                                  const ExtractionOptions& o) {
  require_gate(ref, 2, false);
  cand.validate();
  cand.check_compatible(ref.witness.scenario);
  check_gram_match(ref, cand, o.gram_tol);
  const ProductStructure& ps = ref.structure;
  const ProductStructure cps = product_structure(ref.witness, cand);
  const std::vector<double> th = event_thetas(ps, cps);
  std::map<std::pair<int, int>, int> event_of;
  for (int i = 0; i < ps.events(); ++i) event_of[{ps.index[i][0], ps.index[i][1]}] = i;

  const A2Evidence& ev = *ref.conditions.a2;
  ChainResult ch = run_chain(
      ps, cps, ev, [&](int k, int l) { return th[event_of.at({k, l})]; }, o.consistency_tol);
  if (leading_entry_negative(ch.inner)) {
    ch.inner = -ch.inner;
    ch.outer = -ch.outer;
    for (double& g : ch.outer_signs) g = -g;
  }
  SelfTestReport rep = rank_one_report("bipartite-rank1", {ch.inner, ch.outer});
  rep.gamma = ch.outer_signs;
  detail::fill_residuals(ref, cand, rep);
  return rep;
}

SelfTestReport extract_tripartite_isometries_rank1(const SelfTestReference& ref,
                                                   const Realization& cand,
                                                   const ExtractionOptions& o) {
  require_gate(ref, 3, false);
  cand.validate();
  cand.check_compatible(ref.witness.scenario);
  check_gram_match(ref, cand, o.gram_tol);
  const ProductStructure& ps = ref.structure;
  const ProductStructure cps = product_structure(ref.witness, cand);
  const std::vector<double> th = event_thetas(ps, cps);
  std::map<std::array<int, 3>, int> event_of;
  for (int i = 0; i < ps.events(); ++i) {
    event_of[{ps.index[i][0], ps.index[i][1], ps.index[i][2]}] = i;
  }
  const A6Evidence& a6 = *ref.conditions.a6;
  const double tol = o.consistency_tol;

  // alpha along G_A: each linked triple fixes the relative sign of its two A indices.
  const int na = static_cast<int>(a6.ia.size());
  std::map<Edge, std::array<int, 3>> triple;
  for (std::size_t e = 0; e < a6.edges.size(); ++e) triple[a6.edges[e]] = a6.linked[e];
  std::vector<double> alpha(na, 1.0);
  for (auto [u, v] : bfs_tree(na, a6.edges)) {
    const auto [i, j, k] = triple.at({std::min(u, v), std::max(u, v)});
    auto overlap = [](const ProductStructure& s, int p, int x, int y) {
      return s.local[p][s.index[x][p]].dot(s.local[p][s.index[y][p]]);
    };
    const double rA = overlap(ps, 0, i, j), rB = overlap(ps, 1, i, j), rC = overlap(ps, 2, i, k);
    const double cA = overlap(cps, 0, i, j);
    const double cB = th[i] * th[j] * overlap(cps, 1, i, j);
    const double cC = th[i] * th[k] * overlap(cps, 2, i, k);
    const double eps = rA * cA >= 0.0 ? 1.0 : -1.0;
    const double dev = std::max({std::abs(rA - eps * cA), std::abs(rB - eps * cB), std::abs(rC - eps * cC)});
    if (dev > tol) {
      std::ostringstream os;
      os << "linked triple (" << i << ", " << j << ", " << k
         << ") violates the sign dichotomy (deviation " << dev << ")";
      throw NotAnOptimizer(os.str());
    }
    alpha[v] = alpha[u] * eps;
  }
  Eigen::MatrixXd VA = fit_isometry(columns(ps.local[0], a6.ia), columns(cps.local[0], a6.ia, alpha),
                                    tol, "party 0");

  // V_BC on the union of the I_BC sets, with kappa the sign per (b, c) pair.
  std::map<std::pair<int, int>, double> kappa;
  std::vector<Eigen::VectorXd> src, tgt;
  for (int t = 0; t < na; ++t) {
    for (auto [b, c] : a6.ibc[t]) {
      const int i = event_of.at({a6.ia[t], b, c});
      const double s = alpha[t] * th[i];
      auto [it, fresh] = kappa.emplace(std::make_pair(b, c), s);
      if (!fresh && it->second != s) {
        throw NotAnOptimizer("sign of pair (" + std::to_string(b) + ", " + std::to_string(c) +
                             ") differs between A indices");
      }
      if (fresh) {
        src.push_back(kron(ps.local[1][b], ps.local[2][c]));
        tgt.push_back(s * kron(cps.local[1][b], cps.local[2][c]));
      }
    }
  }
  Eigen::MatrixXd S(src[0].size(), static_cast<Eigen::Index>(src.size()));
  Eigen::MatrixXd T(tgt[0].size(), static_cast<Eigen::Index>(tgt.size()));
  for (std::size_t c = 0; c < src.size(); ++c) {
    S.col(static_cast<Eigen::Index>(c)) = src[c];
    T.col(static_cast<Eigen::Index>(c)) = tgt[c];
  }
  fit_isometry(S, T, tol, "parties 1-2");

  const A2Evidence& a7 = *ref.conditions.a2;
  ChainResult ch = run_chain(
      ps, cps, a7, [&](int c, int b) { return kappa.at({b, c}); }, tol);
  Eigen::MatrixXd VB = ch.outer, VC = ch.inner;
  if (leading_entry_negative(VA)) {
    VA = -VA;
    VC = -VC;
    for (double& a : alpha) a = -a;
  }
  if (leading_entry_negative(VB)) {
    VB = -VB;
    VC = -VC;
    for (double& g : ch.outer_signs) g = -g;
  }
  SelfTestReport rep = rank_one_report("tripartite-rank1", {VA, VB, VC});
  rep.alpha = alpha;
  rep.gamma = ch.outer_signs;
  detail::fill_residuals(ref, cand, rep);
  return rep;
}

SelfTestReport run_selftest(const SelfTestReference& ref, const Realization& cand,
                            const ExtractionOptions& o) {
  cand.validate();
  cand.check_compatible(ref.witness.scenario);
  const bool rank_one = detail::uses_rank_one_projectors(ref.witness, cand);
  if (ref.conditions.party_count == 2) {
    return rank_one ? extract_bipartite_isometries_rank1(ref, cand, o)
                    : extract_bipartite_isometries_general(ref, cand, o);
  }
  return rank_one ? extract_tripartite_isometries_rank1(ref, cand, o)
                  : extract_tripartite_isometries_general(ref, cand, o);
}

}  // namespace bellgraph
