#pragma once

#include <map>
#include <vector>

#include "bellgraph/graph.hpp"
#include "bellgraph/linalg.hpp"
#include "bellgraph/sdp.hpp"

namespace bellgraph {

// Constraint order: X_00 = 1, then X_ii - X_0i = 0 for i = 1..n, then
// X_ij = 0 for each edge in g.edges() order. Matrix index 0 is the handle,
// vertex v sits at index v + 1.
SdpProblem theta_problem(const WeightedGraph& g);

struct ThetaOptions {
  double tol = 1e-9;
  int max_iterations = 200;
  // Variations of the deterministic starting point; (1, 0) is the default.
  double primal_scale = 1.0;
  double dual_shift = 0.0;
};

struct ThetaResult {
  double value = 0.0;
  SymMatrix primal;
  SdpSolution solution;
};

SdpStart theta_start(const WeightedGraph& g, double primal_scale = 1.0, double dual_shift = 0.0);
ThetaResult lovasz_theta(const WeightedGraph& g, const ThetaOptions& options = {});

// Z = t E00 + sum_i (lambda_i - w_i) E_ii - sum_i lambda_i E_0i + sum_{i~j} mu_ij E_ij
// with E_ij = (e_i e_j^T + e_j e_i^T) / 2. Vertex indices in mus are 0-based
// graph vertices with i < j.
struct ThetaDualCertificate {
  double t = 0.0;
  std::vector<double> lambdas;
  std::map<Edge, double> mus;
  SymMatrix matrix;
};

ThetaDualCertificate make_certificate(const WeightedGraph& g, double t,
                                      std::vector<double> lambdas, std::map<Edge, double> mus);

// Reads t, lambda and mu off a dual slack matrix and rematerializes Z from
// them, dropping entries on non-edges and forcing diagonal consistency.
ThetaDualCertificate certificate_from_slack(const WeightedGraph& g, const SymMatrix& z);

// Carries a certificate for g over to relabel(g, perm).
ThetaDualCertificate relabel_certificate(const WeightedGraph& g, const ThetaDualCertificate& c,
                                         const std::vector<int>& perm);

ThetaDualCertificate chsh_dual_certificate();
ThetaDualCertificate chained_dual_certificate(int N);
double mobius_theta_closed_form(int N);

struct CertificateOptions {
  double structural_tol = 1e-9;
  double psd_tol = kPsdTolerance;
};

// Returns the certified bound t. Throws CertificateMalformed or NotPsd.
double verify_dual_certificate(const WeightedGraph& g, const ThetaDualCertificate& cert,
                               const CertificateOptions& options = {});

struct UniquenessVerdict {
  bool nondegenerate = false;
  int nullspace_dim = 0;
  // Smallest singular value of the stacked homogeneous system.
  double residual = 0.0;
};

constexpr double kNullspaceThreshold = 1e-8;

UniquenessVerdict dual_nondegenerate(const WeightedGraph& g, const SymMatrix& z,
                                     double threshold = kNullspaceThreshold);

// Verdict for the dual slack of a solve run at solver_tol, rounded to the
// structural form. Kernel directions of such an inexact dual only shrink like
// sqrt(solver_tol), so singular values up to max(threshold, sqrt(solver_tol))
// count as zero.
UniquenessVerdict solved_dual_nondegenerate(const WeightedGraph& g, const SdpSolution& s,
                                            double solver_tol,
                                            double threshold = kNullspaceThreshold);

// Eigenvalues of z below cutoff * max(1, largest eigenvalue) are set to zero.
SymMatrix clean_spectrum(const SymMatrix& z, double cutoff = 1e-7);

}  // namespace bellgraph
