#include "bellgraph/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bellgraph/errors.hpp"

namespace bellgraph {

SymMatrix::SymMatrix(int dim) {
  if (dim < 0) throw InputError("SymMatrix: negative dimension");
  m_ = Eigen::MatrixXd::Zero(dim, dim);
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw InputError("SymMatrix: matrix is not square");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw InputError("SymMatrix: matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix s(dim);
  s.m_.setIdentity();
  return s;
}

void SymMatrix::set(int i, int j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

void SymMatrix::add(int i, int j, double v) {
  m_(i, j) += v;
  if (i != j) m_(j, i) += v;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim() != o.dim()) throw InputError("SymMatrix: dimension mismatch");
  SymMatrix r;
  r.m_ = m_ + o.m_;
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim() != o.dim()) throw InputError("SymMatrix: dimension mismatch");
  SymMatrix r;
  r.m_ = m_ - o.m_;
  return r;
}

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix r;
  r.m_ = m_ * s;
  return r;
}

Eigen::VectorXd eigenvalues(const SymMatrix& m) {
  if (m.dim() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const SymMatrix& m) {
  if (m.dim() == 0) throw InputError("min_eigenvalue: empty matrix");
  return eigenvalues(m)(0);
}

namespace {

void require_symmetric_row(const std::vector<double>& c) {
  const std::size_t n = c.size();
  if (n == 0) throw InputError("circulant: empty first row");
  for (std::size_t j = 1; j < n; ++j) {
    if (c[j] != c[n - j]) {
      throw InputError("circulant: first row is not symmetric at index " + std::to_string(j));
    }
  }
}

}  // namespace

std::vector<double> circulant_eigenvalues(const std::vector<double>& first_row) {
  require_symmetric_row(first_row);
  const std::size_t n = first_row.size();
  std::vector<double> lambda(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // Reduce jk mod n first so the cosine argument stays in [0, 2 pi).
      std::size_t r = (j * k) % n;
      s += first_row[k] * std::cos(2.0 * std::numbers::pi * static_cast<double>(r) /
                                   static_cast<double>(n));
    }
    lambda[j] = s;
  }
  return lambda;
}

SymMatrix circulant_matrix(const std::vector<double>& first_row) {
  require_symmetric_row(first_row);
  const int n = static_cast<int>(first_row.size());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) m.set(i, j, first_row[(j - i) % n]);
  }
  return m;
}

bool schur_psd_check(const SymMatrix& M, double pivot, const std::vector<double>& border,
                     double psd_tol) {
  if (!(pivot > 0.0)) throw InputError("schur_psd_check: pivot must be positive");
  if (static_cast<int>(border.size()) != M.dim()) {
    throw InputError("schur_psd_check: border length does not match matrix dimension");
  }
  Eigen::Map<const Eigen::VectorXd> b(border.data(), static_cast<Eigen::Index>(border.size()));
  Eigen::MatrixXd s = M.dense() - b * b.transpose() / pivot;
  return min_eigenvalue(SymMatrix(s, 1e-9)) >= -psd_tol;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd r(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a(i) * b;
  return r;
}

}  // namespace bellgraph
