#include <cmath>
#include <sstream>

#include "bellgraph/errors.hpp"
#include "bellgraph/selftest.hpp"
#include "selftest_detail.hpp"

namespace bellgraph {

namespace {

// Two-dimensional blocks Q_j = [e_j, g_j] of one party's projector pair.
struct PartyBlocks {
  std::vector<Eigen::MatrixXd> q;
};

PartyBlocks party_blocks(const Eigen::MatrixXd& P0, const Eigen::MatrixXd& P1,
                         const ExtractionOptions& o) {
  const Eigen::Index d = P0.rows();
  const Eigen::MatrixXd T = P0 * P1 * P0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
  const Eigen::VectorXd& lam = es.eigenvalues();

  // Clusters of intermediate eigenvalues, ascending.
  std::vector<std::vector<Eigen::Index>> clusters;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (lam(k) <= o.eigen_tol || lam(k) >= 1.0 - o.eigen_tol) continue;
    if (clusters.empty() || lam(k) - lam(clusters.back().back()) > o.cluster_tol) clusters.push_back({});
    clusters.back().push_back(k);
  }

  PartyBlocks out;
  for (const auto& cl : clusters) {
    Eigen::MatrixXd E(d, static_cast<Eigen::Index>(cl.size()));
    for (std::size_t c = 0; c < cl.size(); ++c) E.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cl[c]);
    const Eigen::MatrixXd PE = E * E.transpose();
    // Basis independent of the eigensolver: Gram-Schmidt of P_E e_0, P_E e_1, ...
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index s = 0; s < d && basis.size() < cl.size(); ++s) {
      Eigen::VectorXd v = PE.col(s);
      for (const Eigen::VectorXd& b : basis) v -= b.dot(v) * b;
      if (v.norm() > 1e-6) basis.push_back(v.normalized());
    }
    for (const Eigen::VectorXd& e : basis) {
      const Eigen::VectorXd f = (P1 * e).normalized();
      const Eigen::VectorXd g = (f - e.dot(f) * e).normalized();
      Eigen::MatrixXd Q(d, 2);
      Q.col(0) = e;
      Q.col(1) = g;
      out.q.push_back(Q);
    }
  }
  return out;
}

SelfTestReport general_extraction(const SelfTestReference& ref, const Realization& cand,
                                  const ExtractionOptions& o, int parties) {
  const ConditionReport& cr = ref.conditions;
  if (cr.party_count != parties) {
    throw PreconditionError("reference has " + std::to_string(cr.party_count) +
                            " parties, this path needs " + std::to_string(parties));
  }
  const std::string f = cr.first_failure(true);
  if (!f.empty()) throw PreconditionError("condition " + f + " fails for the reference");
  cand.validate();
  cand.check_compatible(ref.witness.scenario);
  if (!check_projector_condition_C1(cand, ref.structure, cr)) {
    throw PreconditionError("condition C1 fails for the candidate projectors");
  }
  check_gram_match(ref, cand, o.gram_tol);

  const ProductStructure& ps = ref.structure;
  const Realization& r = ref.realization;
  std::vector<PartyBlocks> blocks(parties);
  std::vector<int> kdims(parties);
  for (int p = 0; p < parties; ++p) {
    const LocalLabel l0 = ps.labels[p][cr.pairings[p][0][0]];
    const LocalLabel l1 = ps.labels[p][cr.pairings[p][1][0]];
    blocks[p] = party_blocks(cand.projectors[p][l0.setting][l0.outcome],
                             cand.projectors[p][l1.setting][l1.outcome], o);
    kdims[p] = static_cast<int>(blocks[p].q.size());
    if (kdims[p] == 0) throw NotAnOptimizer("party " + std::to_string(p) + " has no two-dimensional block");

    // The sectors outside the blocks must annihilate the state.
    Eigen::MatrixXd Pbar = Eigen::MatrixXd::Identity(cand.dims[p], cand.dims[p]);
    for (const Eigen::MatrixXd& Q : blocks[p].q) Pbar -= Q * Q.transpose();
    std::vector<Eigen::MatrixXd> ops;
    for (int q = 0; q < parties; ++q) {
      ops.push_back(q == p ? Pbar : Eigen::MatrixXd::Identity(cand.dims[q], cand.dims[q]));
    }
    const double leak = apply_local(cand.dims, ops, cand.state).norm();
    if (leak > o.consistency_tol) {
      std::ostringstream os;
      os << "party " << p << ": sectors outside the two-dimensional blocks carry weight " << leak;
      throw NotAnOptimizer(os.str());
    }
  }

  long nblocks = 1;
  for (int k : kdims) nblocks *= k;
  std::vector<std::vector<Eigen::MatrixXd>> local_maps(parties);
  for (int p = 0; p < parties; ++p) local_maps[p].resize(kdims[p]);
  std::vector<Eigen::VectorXd> block_states(nblocks);
  std::vector<double> weights(nblocks);
  auto block_index = [&](long b) {
    std::vector<int> j(parties);
    for (int p = parties - 1; p >= 0; --p) {
      j[p] = static_cast<int>(b % kdims[p]);
      b /= kdims[p];
    }
    return j;
  };

  for (long b = 0; b < nblocks; ++b) {
    const std::vector<int> j = block_index(b);
    std::vector<Eigen::MatrixXd> qt;
    for (int p = 0; p < parties; ++p) qt.push_back(blocks[p].q[j[p]].transpose());
    block_states[b] = apply_local(cand.dims, qt, cand.state);
    weights[b] = block_states[b].norm();
    bool needed = false;
    for (int p = 0; p < parties; ++p) needed = needed || local_maps[p][j[p]].size() == 0;
    if (weights[b] <= o.consistency_tol || !needed) continue;

    // Rank-one realization on the block.
    Realization br;
    br.dims.assign(parties, 2);
    br.state = block_states[b] / weights[b];
    br.projectors.resize(parties);
    for (int p = 0; p < parties; ++p) {
      const Eigen::MatrixXd& Q = blocks[p].q[j[p]];
      for (const auto& outs : cand.projectors[p]) {
        br.projectors[p].emplace_back(outs.size(), Eigen::MatrixXd::Zero(2, 2));
      }
      for (const LocalLabel& l : ps.labels[p]) {
        Eigen::MatrixXd R = Q.transpose() * cand.projectors[p][l.setting][l.outcome] * Q;
        br.projectors[p][l.setting][l.outcome] = 0.5 * (R + R.transpose());
      }
    }
    SelfTestReport sub;
    try {
      br.validate();
      sub = parties == 2 ? extract_bipartite_isometries_rank1(ref, br, o)
                         : extract_tripartite_isometries_rank1(ref, br, o);
    } catch (const InputError& e) {
      throw NotAnOptimizer(std::string("block does not restrict to a projective realization: ") + e.what());
    } catch (const PreconditionError& e) {
      throw NotAnOptimizer(std::string("block does not restrict to rank-one projectors: ") + e.what());
    }
    for (int p = 0; p < parties; ++p) {
      if (local_maps[p][j[p]].size() != 0) continue;
      // The block state's sign lands on an arbitrary party; fix each map's sign
      // by its first column so the junk amplitudes carry it instead.
      Eigen::MatrixXd V = sub.isometries[p];
      Eigen::Index at = 0;
      V.col(0).cwiseAbs().maxCoeff(&at);
      if (V(at, 0) < 0.0) V = -V;
      local_maps[p][j[p]] = V;
    }
  }
  for (int p = 0; p < parties; ++p) {
    for (Eigen::MatrixXd& m : local_maps[p]) {
      if (m.size() == 0) m = Eigen::MatrixXd::Identity(2, 2);
    }
  }

  // Junk amplitudes: block state = c_j (x)_p V_{p,j_p} psi.
  Eigen::VectorXd junk(nblocks);
  for (long b = 0; b < nblocks; ++b) {
    const std::vector<int> j = block_index(b);
    std::vector<Eigen::MatrixXd> vs;
    for (int p = 0; p < parties; ++p) vs.push_back(local_maps[p][j[p]]);
    const Eigen::VectorXd image = apply_local(r.dims, vs, r.state);
    junk(b) = image.dot(block_states[b]);
    const double res = (block_states[b] - junk(b) * image).norm();
    if (res > o.consistency_tol) {
      std::ostringstream os;
      os << "block " << b << " is not a rotated copy of the reference state (residual " << res << ")";
      throw NotAnOptimizer(os.str());
    }
  }
  junk /= junk.norm();

  SelfTestReport rep;
  rep.path = parties == 2 ? "bipartite-general" : "tripartite-general";
  rep.junk_dims = kdims;
  rep.junk = junk;
  for (int p = 0; p < parties; ++p) {
    const int d = r.dims[p], k = kdims[p];
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(cand.dims[p], d * k);
    for (int h = 0; h < d; ++h) {
      for (int jj = 0; jj < k; ++jj) V.col(h * k + jj) = blocks[p].q[jj] * local_maps[p][jj].col(h);
    }
    rep.isometries.push_back(V);
  }
  detail::fill_residuals(ref, cand, rep);
  return rep;
}

}  // namespace

SelfTestReport extract_bipartite_isometries_general(const SelfTestReference& ref,
                                                    const Realization& cand,
                                                    const ExtractionOptions& o) {
  return general_extraction(ref, cand, o, 2);
}

SelfTestReport extract_tripartite_isometries_general(const SelfTestReference& ref,
                                                     const Realization& cand,
                                                     const ExtractionOptions& o) {
  return general_extraction(ref, cand, o, 3);
}

}  // namespace bellgraph
