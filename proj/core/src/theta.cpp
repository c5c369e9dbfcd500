#include "bellgraph/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bellgraph/errors.hpp"

namespace bellgraph {

SdpProblem theta_problem(const WeightedGraph& g) {
  const int n = g.n();
  const int d = n + 1;
  SdpProblem p;
  p.objective = SymMatrix(d);
  for (int i = 0; i < n; ++i) p.objective.set(i + 1, i + 1, g.weight(i));

  SymMatrix e00(d);
  e00.set(0, 0, 1.0);
  p.constraints.push_back({e00, 1.0});
  for (int i = 1; i <= n; ++i) {
    SymMatrix a(d);
    a.set(i, i, 1.0);
    a.set(0, i, -0.5);
    p.constraints.push_back({a, 0.0});
  }
  for (auto [u, v] : g.edges()) {
    SymMatrix a(d);
    a.set(u + 1, v + 1, 0.5);
    p.constraints.push_back({a, 0.0});
  }
  return p;
}

SdpStart theta_start(const WeightedGraph& g, double primal_scale, double dual_shift) {
  if (!(primal_scale > 0.0 && primal_scale <= 1.0)) {
    throw InputError("theta_start: primal_scale must lie in (0, 1]");
  }
  if (!(dual_shift >= 0.0)) throw InputError("theta_start: dual_shift must be nonnegative");
  const int n = g.n();
  const int d = n + 1;
  // X = [[1, eps e^T], [eps e, eps I]] is positive definite for eps < 1/n.
  const double eps = primal_scale / (n + 1);
  SdpStart s;
  s.x = SymMatrix(d);
  s.x.set(0, 0, 1.0);
  for (int i = 1; i <= n; ++i) {
    s.x.set(0, i, eps);
    s.x.set(i, i, eps);
  }
  // lambda_i = 2 m_i, m_i = max(w_i, 1): Z_ii = 2 m_i - w_i >= m_i and
  // sum_i m_i^2 / (2 m_i - w_i) <= sum_i m_i < t keeps Z positive definite.
  const int m = 1 + n + static_cast<int>(g.edges().size());
  s.y = Eigen::VectorXd::Zero(m);
  s.z = SymMatrix(d);
  double t = 1.0 + dual_shift;
  for (int i = 0; i < n; ++i) {
    double mi = std::max(g.weight(i), 1.0);
    t += mi;
    s.y(1 + i) = 2.0 * mi;
    s.z.set(i + 1, i + 1, 2.0 * mi - g.weight(i));
    s.z.set(0, i + 1, -mi);
  }
  s.y(0) = t;
  s.z.set(0, 0, t);
  return s;
}

ThetaResult lovasz_theta(const WeightedGraph& g, const ThetaOptions& options) {
  SdpOptions o;
  o.tol = options.tol;
  o.max_iterations = options.max_iterations;
  o.start = theta_start(g, options.primal_scale, options.dual_shift);
  ThetaResult r;
  r.solution = solve_sdp(theta_problem(g), o);
  r.value = r.solution.value;
  r.primal = r.solution.primal;
  return r;
}

ThetaDualCertificate make_certificate(const WeightedGraph& g, double t,
                                      std::vector<double> lambdas, std::map<Edge, double> mus) {
  const int n = g.n();
  if (static_cast<int>(lambdas.size()) != n) {
    throw InputError("certificate: expected " + std::to_string(n) + " lambdas");
  }
  ThetaDualCertificate c;
  c.t = t;
  c.matrix = SymMatrix(n + 1);
  c.matrix.set(0, 0, t);
  for (int i = 0; i < n; ++i) {
    c.matrix.set(i + 1, i + 1, lambdas[i] - g.weight(i));
    c.matrix.set(0, i + 1, -0.5 * lambdas[i]);
  }
  for (const auto& [e, mu] : mus) {
    if (!g.adjacent(e.first, e.second) || e.first > e.second) {
      throw InputError("certificate: mu given for non-edge " + std::to_string(e.first) + "-" +
                       std::to_string(e.second));
    }
    c.matrix.set(e.first + 1, e.second + 1, 0.5 * mu);
  }
  c.lambdas = std::move(lambdas);
  c.mus = std::move(mus);
  return c;
}

ThetaDualCertificate certificate_from_slack(const WeightedGraph& g, const SymMatrix& z) {
  if (z.dim() != g.n() + 1) throw InputError("certificate_from_slack: dimension mismatch");
  std::vector<double> lambdas(g.n());
  for (int i = 0; i < g.n(); ++i) lambdas[i] = -2.0 * z(0, i + 1);
  std::map<Edge, double> mus;
  for (auto [u, v] : g.edges()) mus[{u, v}] = 2.0 * z(u + 1, v + 1);
  return make_certificate(g, z(0, 0), std::move(lambdas), std::move(mus));
}

ThetaDualCertificate relabel_certificate(const WeightedGraph& g, const ThetaDualCertificate& c,
                                         const std::vector<int>& perm) {
  const WeightedGraph h = relabel(g, perm);
  if (static_cast<int>(c.lambdas.size()) != g.n()) throw InputError("relabel_certificate: lambda count mismatch");
  std::vector<double> lambdas(g.n());
  for (int i = 0; i < g.n(); ++i) lambdas[perm[i]] = c.lambdas[i];
  std::map<Edge, double> mus;
  for (const auto& [e, mu] : c.mus) {
    const int a = perm[e.first], b = perm[e.second];
    mus[{std::min(a, b), std::max(a, b)}] = mu;
  }
  return make_certificate(h, c.t, std::move(lambdas), std::move(mus));
}

ThetaDualCertificate chsh_dual_certificate() {
  const WeightedGraph g = circulant(8, {1, 4});
  const double s2 = std::numbers::sqrt2;
  const double h = 2.0 - s2;
  const double k = 3.0 - 2.0 * s2;
  std::map<Edge, double> mus;
  for (auto [u, v] : g.edges()) mus[{u, v}] = (v - u == 4) ? 2.0 * k : 2.0 * h;
  ThetaDualCertificate c = make_certificate(g, 2.0 + s2, std::vector<double>(8, 2.0), mus);
  verify_dual_certificate(g, c);
  return c;
}

ThetaDualCertificate chained_dual_certificate(int N) {
  const WeightedGraph g = mobius_ladder(N);
  const double k = std::cos(std::numbers::pi / (2.0 * N));
  const double f = (1.0 - k) / (1.0 + k);
  const double l = 1.0 / (1.0 + k);
  std::map<Edge, double> mus;
  for (auto [u, v] : g.edges()) mus[{u, v}] = (v - u == 2 * N) ? 2.0 * f : 2.0 * l;
  ThetaDualCertificate c =
      make_certificate(g, N / l, std::vector<double>(4 * N, 2.0), std::move(mus));
  verify_dual_certificate(g, c);
  return c;
}

double mobius_theta_closed_form(int N) {
  if (N < 2) throw InputError("mobius_theta_closed_form: N must be at least 2");
  return N * (1.0 + std::cos(std::numbers::pi / (2.0 * N)));
}

double verify_dual_certificate(const WeightedGraph& g, const ThetaDualCertificate& cert,
                               const CertificateOptions& options) {
  const int n = g.n();
  const SymMatrix& Z = cert.matrix;
  if (Z.dim() != n + 1) {
    throw InputError("verify_dual_certificate: matrix dimension " + std::to_string(Z.dim()) +
                     ", expected " + std::to_string(n + 1));
  }
  if (static_cast<int>(cert.lambdas.size()) != n) {
    throw InputError("verify_dual_certificate: expected " + std::to_string(n) + " lambdas");
  }
  const double tol = options.structural_tol * std::max(1.0, std::abs(cert.t));
  auto malformed = [](const std::string& what, int r, int c) {
    throw CertificateMalformed("certificate entry (" + std::to_string(r) + "," + std::to_string(c) +
                                   "): " + what,
                               r, c);
  };

  if (std::abs(Z(0, 0) - cert.t) > tol) malformed("top-left entry differs from t", 0, 0);
  for (int i = 0; i < n; ++i) {
    const double lambda = cert.lambdas[i];
    if (std::abs(Z(0, i + 1) + 0.5 * lambda) > tol) {
      malformed("border entry differs from -lambda/2", 0, i + 1);
    }
    if (std::abs(Z(i + 1, i + 1) - (lambda - g.weight(i))) > tol) {
      malformed("diagonal entry differs from lambda - w", i + 1, i + 1);
    }
  }
  for (const auto& [e, mu] : cert.mus) {
    if (e.first < 0 || e.second >= n || e.first >= e.second || !g.adjacent(e.first, e.second)) {
      malformed("mu attached to a non-edge", e.first + 1, e.second + 1);
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double zuv = Z(u + 1, v + 1);
      if (!g.adjacent(u, v)) {
        if (std::abs(zuv) > tol) malformed("nonzero entry on a non-edge", u + 1, v + 1);
        continue;
      }
      auto it = cert.mus.find({u, v});
      const double mu = it == cert.mus.end() ? 0.0 : it->second;
      if (std::abs(zuv - 0.5 * mu) > tol) malformed("edge entry differs from mu/2", u + 1, v + 1);
    }
  }

  const double lmin = min_eigenvalue(Z);
  if (lmin < -options.psd_tol) {
    throw NotPsd("certificate is not PSD: min eigenvalue " + std::to_string(lmin), lmin);
  }
  return cert.t;
}

UniquenessVerdict dual_nondegenerate(const WeightedGraph& g, const SymMatrix& z,
                                     double threshold) {
  const int n = g.n();
  const int d = n + 1;
  if (z.dim() != d) {
    throw InputError("dual_nondegenerate: matrix dimension " + std::to_string(z.dim()) +
                     ", expected " + std::to_string(d));
  }
  // Unknowns: upper triangle of the symmetric M.
  auto idx = [d](int r, int c) {
    if (r > c) std::swap(r, c);
    return r * d - r * (r - 1) / 2 + (c - r);
  };
  const int unknowns = d * (d + 1) / 2;
  const int rows = 1 + n + static_cast<int>(g.edges().size()) + d * d;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows, unknowns);
  int row = 0;
  S(row++, idx(0, 0)) = 1.0;
  for (int i = 1; i <= n; ++i) {
    S(row, idx(0, i)) += 1.0;
    S(row, idx(i, i)) -= 1.0;
    ++row;
  }
  for (auto [u, v] : g.edges()) S(row++, idx(u + 1, v + 1)) = 1.0;

  // (M Z)_rc = sum_k M_rk Z_kc, with Z scaled to unit max entry.
  double zmax = z.dense().cwiseAbs().maxCoeff();
  Eigen::MatrixXd Zs = zmax > 0.0 ? Eigen::MatrixXd(z.dense() / zmax) : z.dense();
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      for (int k = 0; k < d; ++k) S(row, idx(r, k)) += Zs(k, c);
      ++row;
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(S);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > threshold ? 1 : 0;
  UniquenessVerdict v;
  v.nullspace_dim = unknowns - rank;
  v.nondegenerate = v.nullspace_dim == 0;
  v.residual = sv.size() == unknowns ? sv(sv.size() - 1) : 0.0;
  return v;
}

UniquenessVerdict solved_dual_nondegenerate(const WeightedGraph& g, const SdpSolution& s,
                                            double solver_tol, double threshold) {
  if (!(solver_tol > 0.0)) throw InputError("solved_dual_nondegenerate: tolerance must be positive");
  const SymMatrix z = clean_spectrum(certificate_from_slack(g, s.dual_slack).matrix);
  return dual_nondegenerate(g, z, std::max(threshold, std::sqrt(solver_tol)));
}

SymMatrix clean_spectrum(const SymMatrix& z, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.dense());
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= cutoff * scale) ev(i) = 0.0;
  }
  Eigen::MatrixXd m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return SymMatrix(0.5 * (m + m.transpose()), 1e-9);
}

}  // namespace bellgraph
