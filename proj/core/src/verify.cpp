#include <cmath>
#include <numbers>

#include "bellgraph/errors.hpp"
#include "bellgraph/selftest.hpp"

namespace bellgraph {

bool verify_selftest_claim(const SelfTestReference& ref, const Realization& cand,
                           const SelfTestReport& report, double tol) {
  const Realization& r = ref.realization;
  const int n = r.parties();
  if (static_cast<int>(report.isometries.size()) != n ||
      static_cast<int>(report.junk_dims.size()) != n || cand.parties() != n) {
    return false;
  }
  long kd = 1;
  for (int k : report.junk_dims) kd *= k;
  if (report.junk.size() != kd || std::abs(report.junk.norm() - 1.0) > tol) return false;

  std::vector<int> joint(n);
  for (int p = 0; p < n; ++p) {
    const Eigen::MatrixXd& V = report.isometries[p];
    joint[p] = r.dims[p] * report.junk_dims[p];
    if (V.cols() != joint[p] || V.rows() != cand.dims[p]) return false;
    const double iso =
        (V.transpose() * V - Eigen::MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
    if (!(iso <= tol)) return false;
  }

  // Everything is applied on H (x) K with the measurements lifted to M (x) I.
  const Eigen::VectorXd lifted = interleave_ancilla(r.state, r.dims, report.junk, report.junk_dims);
  if (!((apply_local(joint, report.isometries, lifted) - cand.state).norm() <= tol)) return false;
  for (const WitnessTerm& t : ref.witness.terms) {
    std::vector<Eigen::MatrixXd> ms, mc;
    for (int p = 0; p < n; ++p) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(report.junk_dims[p], report.junk_dims[p]);
      ms.push_back(report.isometries[p] * kron(r.projectors[p][t.event.x[p]][t.event.a[p]], I));
      mc.push_back(cand.projectors[p][t.event.x[p]][t.event.a[p]]);
    }
    const Eigen::VectorXd lhs = apply_local(joint, ms, lifted);
    const Eigen::VectorXd rhs = apply_local(cand.dims, mc, cand.state);
    if (!((lhs - rhs).norm() <= tol)) return false;
  }
  return true;
}

SymMatrix chsh_primal_closed_form() {
  const double chi = (2.0 + std::numbers::sqrt2) / 8.0;
  const double xi = (1.0 + std::numbers::sqrt2) / 8.0;
  const double row[8] = {chi, 0.0, chi / 2.0, xi, 0.0, xi, chi / 2.0, 0.0};
  SymMatrix p(9);
  p.set(0, 0, 1.0);
  for (int i = 0; i < 8; ++i) {
    p.set(0, i + 1, chi);
    for (int j = i; j < 8; ++j) p.set(i + 1, j + 1, row[(j - i) % 8]);
  }
  return p;
}

SymMatrix mermin_primal_closed_form() {
  const double a = 0.25, b = 0.125;
  const WeightedGraph g = shrikhande_complement();
  SymMatrix p(17);
  p.set(0, 0, 1.0);
  for (int i = 0; i < 16; ++i) {
    p.set(0, i + 1, a);
    p.set(i + 1, i + 1, a);
    for (int j = i + 1; j < 16; ++j) {
      if (!g.adjacent(i, j)) p.set(i + 1, j + 1, b);
    }
  }
  return p;
}

Eigen::MatrixXd mermin_seven_dim_vectors() {
  static const double u[16][7] = {
      {0.25, -0.113, -0.241, 0.284, 0.088, 0.166, -0.029},
      {0.25, -0.110, -0.251, -0.120, 0.247, -0.021, -0.191},
      {0.25, -0.292, 0.079, 0.151, 0.075, -0.051, -0.255},
      {0.25, 0.182, -0.087, 0.003, 0.311, 0.215, 0.059},
      {0.25, -0.226, 0.069, 0.104, -0.227, 0.262, -0.021},
      {0.25, 0.223, -0.059, 0.300, 0.068, -0.075, 0.184},
      {0.25, -0.004, -0.232, 0.130, -0.298, 0.001, 0.167},
      {0.25, -0.247, 0.049, -0.152, 0.140, -0.278, 0.059},
      {0.25, 0.251, -0.059, -0.252, 0.019, 0.091, -0.222},
      {0.25, 0.0, -0.242, -0.274, -0.139, -0.186, 0.004},
      {0.25, 0.069, 0.271, 0.019, -0.154, 0.062, -0.285},
      {0.25, 0.044, 0.261, 0.167, 0.054, -0.291, -0.042},
      {0.25, 0.069, 0.223, -0.178, -0.004, 0.312, 0.067},
      {0.25, 0.045, 0.212, -0.030, 0.204, -0.042, 0.310},
      {0.25, -0.182, 0.039, -0.200, -0.161, 0.035, 0.293},
      {0.25, 0.291, -0.031, 0.046, -0.225, -0.199, -0.097},
  };
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(7, 17);
  m(0, 0) = 1.0;
  for (int i = 0; i < 16; ++i) {
    for (int k = 0; k < 7; ++k) m(k, i + 1) = u[i][k];
  }
  return m;
}

double mermin_seven_dim_check() {
  const Eigen::MatrixXd u = mermin_seven_dim_vectors();
  const Eigen::MatrixXd g = u.transpose() * u;
  // The printed vectors carry their own vertex labels; align them to the event
  // order through the orthogonality graph before comparing.
  std::vector<Edge> edges;
  for (int i = 0; i < 16; ++i) {
    for (int j = i + 1; j < 16; ++j) {
      if (std::abs(g(i + 1, j + 1)) < 0.0625) edges.emplace_back(i, j);
    }
  }
  const auto perm = find_isomorphism(WeightedGraph(16, edges), shrikhande_complement(), false);
  if (!perm) return (g - mermin_primal_closed_form().dense()).cwiseAbs().maxCoeff();
  Eigen::MatrixXd aligned = Eigen::MatrixXd::Zero(7, 17);
  aligned.col(0) = u.col(0);
  for (int i = 0; i < 16; ++i) aligned.col((*perm)[i] + 1) = u.col(i + 1);
  return (aligned.transpose() * aligned - mermin_primal_closed_form().dense()).cwiseAbs().maxCoeff();
}

}  // namespace bellgraph
