#pragma once

#include <string>
#include <vector>

#include "bellgraph/graph.hpp"
#include "bellgraph/realization.hpp"
#include "bellgraph/scenario.hpp"
#include "bellgraph/sdp.hpp"
#include "bellgraph/selftest.hpp"
#include "bellgraph/theta.hpp"

// JSON and DOT serialization. Every writer emits keys in sorted order and
// doubles in shortest round-trip form, so output is byte-stable. Readers
// throw InputError on malformed documents.
namespace bellgraph::io {

// {"n": int, "edges": [[i, j], ...], "weights": [float, ...]}
std::string graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const std::string& text);

// Undirected DOT; labels (optional) name the nodes, weights become attributes.
std::string graph_to_dot(const WeightedGraph& g, const std::string& name,
                         const std::vector<std::string>& labels = {});

// Dense row-major arrays.
std::string matrix_to_json(const Eigen::MatrixXd& m);
std::string sdp_problem_to_json(const SdpProblem& p);
std::string sdp_solution_to_json(const SdpSolution& s);

// {"t": float, "lambda": [...], "mu": {"i-j": float}, "matrix": [[...]]}.
std::string certificate_to_json(const ThetaDualCertificate& c);
// Rebuilds the matrix from t, lambda and mu; a supplied "matrix" must agree
// within 1e-9 or CertificateMalformed is thrown at the first differing entry.
ThetaDualCertificate certificate_from_json(const WeightedGraph& g, const std::string& text);

// {"scenario": {...}, "terms": [{"a": [...], "x": [...], "w": float}], "classical_bound": float, ...}
std::string witness_to_json(const BellWitness& w);
BellWitness witness_from_json(const std::string& text);

// {"dims": [...], "state": [...], "projectors": [party][setting][outcome] matrices, "vectors": optional}
std::string realization_to_json(const Realization& r);
Realization realization_from_json(const std::string& text);

std::string conditions_to_json(const ConditionReport& c, const ProductStructure& ps);
std::string selftest_report_to_json(const SelfTestReport& r);

}  // namespace bellgraph::io
