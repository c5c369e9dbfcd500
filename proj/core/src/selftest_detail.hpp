#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bellgraph/selftest.hpp"

namespace bellgraph::detail {

// Least-squares map V with V src = tgt; throws NotAnOptimizer when the fit
// residual or V^T V - I exceeds tol.
Eigen::MatrixXd fit_isometry(const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt, double tol,
                             const std::string& what);

bool leading_entry_negative(const Eigen::MatrixXd& m);

// BFS from vertex 0: visiting order and (parent, child) tree edges.
std::vector<std::pair<int, int>> bfs_tree(int n, const std::vector<Edge>& edges);

// state_residual and vector_residuals from the isometries and junk.
void fill_residuals(const SelfTestReference& ref, const Realization& cand, SelfTestReport& rep);

// True when every projector the witness uses has trace one.
bool uses_rank_one_projectors(const BellWitness& wit, const Realization& cand);

}  // namespace bellgraph::detail
