#include <cmath>

#include "bellgraph/errors.hpp"
#include "bellgraph/selftest.hpp"

namespace bellgraph {

GramDecomposition gram_decompose(const SymMatrix& x, double tol) {
  if (x.dim() == 0) throw InputError("gram_decompose: empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.dense());
  if (es.info() != Eigen::Success) throw InputError("gram_decompose: eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (lam(0) < -10.0 * tol) throw NotPsd("gram_decompose: matrix is not PSD", lam(0));

  // Eigenvalues ascend; keep the retained directions in descending order.
  std::vector<int> keep;
  for (int k = static_cast<int>(lam.size()) - 1; k >= 0; --k) {
    if (lam(k) > tol) keep.push_back(k);
  }
  GramDecomposition g;
  g.rank = static_cast<int>(keep.size());
  g.vectors = Eigen::MatrixXd::Zero(g.rank, x.dim());
  for (int r = 0; r < g.rank; ++r) {
    Eigen::VectorXd u = es.eigenvectors().col(keep[r]);
    for (int i = 0; i < u.size(); ++i) {
      if (std::abs(u(i)) > 1e-12) {
        if (u(i) < 0.0) u = -u;
        break;
      }
    }
    g.vectors.row(r) = std::sqrt(lam(keep[r])) * u.transpose();
  }
  g.truncation_error = (g.vectors.transpose() * g.vectors - x.dense()).cwiseAbs().maxCoeff();
  return g;
}

GramDecomposition handle_gauge(const GramDecomposition& g) {
  GramDecomposition out = g;
  if (g.rank == 0) return out;
  const Eigen::VectorXd h = g.vectors.col(0);
  const double nh = h.norm();
  if (nh == 0.0) throw InputError("handle_gauge: zero handle");
  Eigen::VectorXd w = h;
  w(0) -= nh;
  const double nw = w.norm();
  if (nw < 1e-14 * nh) return out;
  w /= nw;
  out.vectors -= 2.0 * w * (w.transpose() * g.vectors);
  return out;
}

}  // namespace bellgraph
