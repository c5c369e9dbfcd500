#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bellgraph/linalg.hpp"
#include "bellgraph/realization.hpp"
#include "bellgraph/scenario.hpp"

namespace bellgraph {

// Columns are the Gram vectors; column 0 is the handle.
struct GramDecomposition {
  Eigen::MatrixXd vectors;
  int rank = 0;
  double truncation_error = 0.0;
};

// Spectral factorization keeping eigenvalues > tol. Each eigenvector's first
// nonzero coordinate is made positive. Throws NotPsd below -10 tol.
GramDecomposition gram_decompose(const SymMatrix& x, double tol = 1e-9);
// Householder reflection taking the handle to a positive multiple of e_0.
GramDecomposition handle_gauge(const GramDecomposition& g);

struct LocalLabel {
  int setting = 0;
  int outcome = 0;
  friend bool operator==(const LocalLabel&, const LocalLabel&) = default;
  friend auto operator<=>(const LocalLabel&, const LocalLabel&) = default;
};

// v_i = s_i (a_{i_A} (x) b_{i_B} [(x) c_{i_C}]) with eta_i v_i = Pi_i psi.
struct ProductStructure {
  int party_count = 0;
  std::vector<int> dims;
  Eigen::VectorXd state;
  // Local indices per party, sorted by (setting, outcome).
  std::vector<std::vector<LocalLabel>> labels;
  std::vector<std::vector<Eigen::VectorXd>> local;
  // index[i][p] is event i's local index for party p.
  std::vector<std::vector<int>> index;
  std::vector<double> etas;
  std::vector<double> signs;

  int events() const { return static_cast<int>(index.size()); }
  Eigen::VectorXd event_vector(int i) const;
  int find_label(int party, LocalLabel l) const;  // -1 if absent
};

constexpr double kMinEta = 1e-10;

// Requires every projector used by the witness to have rank one; local
// vectors are read off r.vectors or the projectors' top eigenvectors.
// Throws PreconditionError on higher rank or an event with eta < kMinEta.
ProductStructure product_structure(const BellWitness& wit, const Realization& r);

struct ConditionVerdict {
  bool holds = false;
  std::string reason;
};

// A2 evidence. For the tripartite A7 check, inner is party C and outer party B.
struct A2Evidence {
  int inner_party = 0;
  int outer_party = 1;
  std::vector<int> outer;               // I_B
  std::vector<std::vector<int>> inner;  // I_{A,i_B}, aligned with outer
  std::vector<Edge> edges;              // B4 graph, positions into outer
};

struct A6Evidence {
  std::vector<int> ia;                                  // I_A
  std::vector<std::vector<std::pair<int, int>>> ibc;    // I_{BC,i_A}, aligned with ia
  std::vector<Edge> edges;                              // G_A, positions into ia
  std::vector<std::array<int, 3>> linked;               // one linked event triple per edge
  bool per_element_span = false;
  bool union_span = false;
  bool connected = false;
};

struct ConditionOptions {
  double overlap_tol = 1e-8;  // "nonzero overlap" threshold
  double rank_tol = 1e-8;     // singular-value threshold for spanning checks
};

struct ConditionReport {
  int party_count = 0;
  int span_rank = 0;
  std::map<std::string, ConditionVerdict> verdicts;
  std::optional<A2Evidence> a2;  // A2 (bipartite) or A7 (tripartite)
  std::optional<A6Evidence> a6;
  // Orthogonal pairings per party (A4/A9): pairs of local indices, ordered by setting.
  std::vector<std::vector<std::array<int, 2>>> pairings;

  bool holds(const std::string& c) const;
  // Gate for rank-one extraction: A2, or relaxed A6 plus A7.
  bool rank_one_ready() const;
  // Gate for general-rank extraction: rank_one_ready plus A3/A4 or A8/A9.
  bool general_ready() const;
  std::string first_failure(bool general) const;
};

ConditionReport check_bipartite_conditions(const ProductStructure& ps,
                                           const ConditionOptions& o = {});
ConditionReport check_tripartite_conditions(const ProductStructure& ps,
                                            const ConditionOptions& o = {});
ConditionReport check_conditions(const ProductStructure& ps, const ConditionOptions& o = {});

// B1-B4 for given I_B / I_{A,i_B}; fills edges and returns connectivity of the
// B4 graph together with the spanning and containment checks.
bool check_a2_evidence(const ProductStructure& ps, A2Evidence& ev,
                       const std::vector<std::pair<int, int>>& pairs, const ConditionOptions& o = {});

// A6 requirements for a given I_A, with I_{BC,i_A} every (i_B, i_C) of an
// event carrying i_A.
A6Evidence evaluate_a6(const ProductStructure& ps, const std::vector<int>& ia,
                       const ConditionOptions& o = {});

// Re-derives each recorded verdict from its evidence.
bool validate_evidence(const ProductStructure& ps, const ConditionReport& report,
                       const ConditionOptions& o = {});

// Linked triple test of the tripartite definition (pairwise nonzero overlaps,
// each pair sharing exactly one distinct party component).
bool linked(const ProductStructure& ps, int i, int j, int k, double overlap_tol = 1e-8);

// Candidate projectors of every orthogonal local pair sum to the identity.
bool check_projector_condition_C1(const Realization& cand, const ProductStructure& ref,
                                  const ConditionReport& report, double tol = 1e-10);

struct SelfTestReference {
  BellWitness witness;
  Realization realization;
  ProductStructure structure;
  ConditionReport conditions;
  SymMatrix gram;  // behaviour Gram of {psi, Pi_i psi}
};

SelfTestReference prepare_reference(const BellWitness& wit, const Realization& ref,
                                    const ConditionOptions& o = {});
SelfTestReference prepare_reference(const ScenarioId& id);

struct ExtractionOptions {
  double gram_tol = 1e-8;
  double consistency_tol = 1e-8;
  double overlap_tol = 1e-8;
  double eigen_tol = 1e-8;    // sector boundaries in the general-rank pipeline
  double cluster_tol = 1e-7;  // eigenvalue clustering of the block operator
};

struct SelfTestReport {
  std::string path;
  // V_p maps H_p (x) K_p to H'_p; column h * k_p + j.
  std::vector<Eigen::MatrixXd> isometries;
  std::vector<int> junk_dims;
  Eigen::VectorXd junk;  // on K_0 (x) K_1 ...; [1] in the rank-one case
  double state_residual = 0.0;
  std::vector<double> vector_residuals;
  // Sign factors from the propagation (alpha, rho/gamma) for diagnostics.
  std::vector<double> alpha;
  std::vector<double> gamma;
};

// All extraction entry points throw NotAnOptimizer on a Gram mismatch or a
// failed consistency check, and PreconditionError when the gate is not met.
SelfTestReport extract_bipartite_isometries_rank1(const SelfTestReference& ref,
                                                  const Realization& cand,
                                                  const ExtractionOptions& o = {});
SelfTestReport extract_tripartite_isometries_rank1(const SelfTestReference& ref,
                                                   const Realization& cand,
                                                   const ExtractionOptions& o = {});
SelfTestReport extract_bipartite_isometries_general(const SelfTestReference& ref,
                                                    const Realization& cand,
                                                    const ExtractionOptions& o = {});
SelfTestReport extract_tripartite_isometries_general(const SelfTestReference& ref,
                                                     const Realization& cand,
                                                     const ExtractionOptions& o = {});

// Rank-one path when every candidate projector used has rank one, general
// path otherwise.
SelfTestReport run_selftest(const SelfTestReference& ref, const Realization& cand,
                            const ExtractionOptions& o = {});

// Gram check shared by every path; throws NotAnOptimizer("Gram mismatch ...").
void check_gram_match(const SelfTestReference& ref, const Realization& cand, double tol);

// Independent re-check of isometry, state and per-event residuals at tol.
bool verify_selftest_claim(const SelfTestReference& ref, const Realization& cand,
                           const SelfTestReport& report, double tol);

// Gram matrices printed in closed form.
SymMatrix chsh_primal_closed_form();
SymMatrix mermin_primal_closed_form();
// Max-entry deviation of the printed seven-dimensional configuration's Gram
// matrix from the closed-form Mermin optimizer, after mapping the printed
// vertex labels onto the event order by a graph isomorphism of the
// orthogonality pattern (the printed order is not the event order).
double mermin_seven_dim_check();
Eigen::MatrixXd mermin_seven_dim_vectors();  // 7 x 17, column i = u_i

}  // namespace bellgraph
