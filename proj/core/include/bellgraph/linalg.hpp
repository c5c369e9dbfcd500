#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bellgraph {

// Dense real symmetric matrix. Every mutation writes both triangles, so
// entries(i, j) == entries(j, i) holds bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);
  // Throws InputError if m is not square or not symmetric within tol
  // (relative to its largest entry); the stored matrix is (m + m^T) / 2.
  explicit SymMatrix(const Eigen::MatrixXd& m, double tol = 1e-12);

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim) { return SymMatrix(dim); }

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v);
  void add(int i, int j, double v);

  const Eigen::MatrixXd& dense() const { return m_; }

  // Frobenius inner product.
  double dot(const SymMatrix& other) const { return m_.cwiseProduct(other.m_).sum(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  Eigen::MatrixXd m_;
};

// Ascending eigenvalues.
Eigen::VectorXd eigenvalues(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);

constexpr double kPsdTolerance = 1e-9;

// lambda_j = sum_k c_k cos(2 pi j k / n) for a symmetric first row.
std::vector<double> circulant_eigenvalues(const std::vector<double>& first_row);
SymMatrix circulant_matrix(const std::vector<double>& first_row);

// PSD test of [[pivot, -border^T], [-border, M]] through the Schur complement
// M - border border^T / pivot.
bool schur_psd_check(const SymMatrix& M, double pivot, const std::vector<double>& border,
                     double psd_tol = kPsdTolerance);

// Real Kronecker product a (x) b.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace bellgraph
