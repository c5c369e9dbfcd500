#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "bellgraph/linalg.hpp"

namespace bellgraph {

struct SdpConstraint {
  SymMatrix a;
  double b = 0.0;
};

// maximize <C, X>  s.t.  <A_i, X> = b_i,  X >= 0
// minimize b^T y   s.t.  Z = sum_i y_i A_i - C >= 0
struct SdpProblem {
  SymMatrix objective;
  std::vector<SdpConstraint> constraints;

  int dim() const { return objective.dim(); }
  // Throws InputError on dimension mismatch or an empty constraint list.
  void validate() const;
};

struct SdpSolution {
  SymMatrix primal;
  Eigen::VectorXd dual_multipliers;
  SymMatrix dual_slack;
  double value = 0.0;  // <C, X>
  double dual_value = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;  // max_i |<A_i, X> - b_i|
  double dual_residual = 0.0;    // max entry of |sum y_i A_i - C - Z|
  int iterations = 0;
};

// Starting point; X and Z must be positive definite.
struct SdpStart {
  SymMatrix x;
  Eigen::VectorXd y;
  SymMatrix z;
};

struct SdpIterate {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double mu = 0.0;
};

struct SdpOptions {
  double tol = 1e-9;
  int max_iterations = 200;
  double step_fraction = 0.98;
  std::optional<SdpStart> start;
  // Called for iterates 0..iterations, the starting point included.
  std::function<void(const SdpIterate&)> on_iterate;
};

// Primal-dual path following (Nesterov-Todd direction, Mehrotra predictor-corrector).
// Throws SolverError carrying the last residuals if tol is not reached.
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& options);
SdpSolution solve_sdp(const SdpProblem& p, double tol);

}  // namespace bellgraph
