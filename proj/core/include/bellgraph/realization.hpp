#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bellgraph/graph.hpp"
#include "bellgraph/linalg.hpp"
#include "bellgraph/scenario.hpp"

namespace bellgraph {

// Real projective realization. The joint space is the Kronecker product of the
// local spaces with party 0 most significant.
struct Realization {
  std::vector<int> dims;
  Eigen::VectorXd state;
  // projectors[p][x][a] acts on party p's local space.
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> projectors;
  // Defining unit vectors, same indexing; empty unless every projector is rank one.
  std::vector<std::vector<std::vector<Eigen::VectorXd>>> vectors;

  int parties() const { return static_cast<int>(dims.size()); }
  int total_dim() const;
  bool rank_one() const { return !vectors.empty(); }

  // Throws InputError on shape errors, a non-unit state, non-projectors or
  // non-orthogonal outcomes of one setting.
  void validate() const;
  // Throws InputError if the realization cannot serve the scenario's labels.
  void check_compatible(const BellScenario& s) const;
};

// Projectors |v><v| built from vectors[p][x][a].
Realization rank_one_realization(std::vector<int> dims, Eigen::VectorXd state,
                                 std::vector<std::vector<std::vector<Eigen::VectorXd>>> vectors);

Realization reference_realization(const ScenarioId& id);

// Local unit kets of the reference realizations.
Eigen::VectorXd ket_m(double angle);  // cos(angle)|0> + sin(angle)|1>
std::vector<double> as4_angles();     // alpha_0..alpha_3
double as4_state_angle();

// (op_0 (x) op_1 (x) ...) v where op_p maps dims[p] to op_p.rows().
Eigen::VectorXd apply_local(const std::vector<int>& dims, const std::vector<Eigen::MatrixXd>& ops,
                            const Eigen::VectorXd& v);

// Pi_e psi for the event e.
Eigen::VectorXd apply_event(const Realization& r, const Event& e);

struct WitnessEvaluation {
  double value = 0.0;           // sum_i w_i p_i
  double operator_value = 0.0;  // affine_scale * value + affine_offset
  std::vector<double> probabilities;
  // Graph edges (i, j) with tr(Pi_i Pi_j) > 1e-10.
  std::vector<Edge> violations;
};

WitnessEvaluation evaluate_witness(const BellWitness& wit, const Realization& r);

// Gram matrix of {psi, Pi_1 psi, ..., Pi_n psi}; a feasible theta primal point.
SymMatrix behavior_gram(const BellWitness& wit, const Realization& r);

// psi (x) junk rearranged to H_0 K_0 H_1 K_1 ...
Eigen::VectorXd interleave_ancilla(const Eigen::VectorXd& psi, const std::vector<int>& dims,
                                   const Eigen::VectorXd& junk, const std::vector<int>& kdims);

// Candidate construction.

// V_p = sum_j U_{p,j} (x) |j><j| on H_p (x) K_p; the candidate is
// (V_A (x) V_B ...)(psi (x) junk) with projectors V_p (P (x) I) V_p^T. Empty
// rotations mean identity blocks. The junk state lives on K_0 (x) K_1 ...
Realization with_ancilla(const Realization& r, const std::vector<int>& ancilla_dims,
                         const Eigen::VectorXd& junk,
                         const std::vector<std::vector<Eigen::MatrixXd>>& rotations = {});

// Applies local isometries (columns orthonormal, rows >= cols) to state,
// projectors and defining vectors.
Realization transform_realization(const Realization& r, const std::vector<Eigen::MatrixXd>& isometries);

// Haar-ish random orthogonal matrix from a seeded generator (QR of a Gaussian matrix).
Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed);
// Random isometry from dim to dim + extra.
Eigen::MatrixXd random_isometry(int dim, int extra, std::uint64_t seed);

// Rotates the projectors (and vectors) of one setting by angle in the plane of
// the first two basis vectors of that party.
Realization perturb_setting(const Realization& r, int party, int setting, double angle);

}  // namespace bellgraph
