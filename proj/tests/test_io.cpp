#include <gtest/gtest.h>

#include "bellgraph/errors.hpp"
#include "bellgraph/io.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace bellgraph;
using bellgraph::testing::max_abs;

TEST(Io, GraphRoundTrip) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const WeightedGraph g = bellgraph::testing::random_graph(8, 0.4, rng, true);
    const std::string text = io::graph_to_json(g);
    EXPECT_EQ(io::graph_from_json(text), g);
    EXPECT_EQ(io::graph_to_json(io::graph_from_json(text)), text);
  }
}

TEST(Io, GraphSchema) {
  const WeightedGraph g = io::graph_from_json(R"({"n": 3, "edges": [[0, 2]]})");
  EXPECT_EQ(g.n(), 3);
  EXPECT_TRUE(g.adjacent(0, 2));
  EXPECT_EQ(g.weight(1), 1.0);
  EXPECT_THROW(io::graph_from_json("{"), InputError);
  EXPECT_THROW(io::graph_from_json(R"({"edges": []})"), InputError);
  EXPECT_THROW(io::graph_from_json(R"({"n": 2, "edges": [[0, 1, 2]]})"), InputError);
  EXPECT_THROW(io::graph_from_json(R"({"n": 2, "edges": [[0, 5]]})"), InputError);
}

TEST(Io, Dot) {
  const std::string dot = io::graph_to_dot(shrikhande_complement(), "mermin", mermin_event_names());
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '['), 16);
  EXPECT_NE(dot.find("label=\"ZPP\""), std::string::npos);
  EXPECT_EQ(static_cast<std::size_t>(std::count(dot.begin(), dot.end(), '-')) / 2, shrikhande_complement().edges().size());
}

TEST(Io, CertificateRoundTrip) {
  const WeightedGraph g = circulant(8, {1, 4});
  const ThetaDualCertificate c = chsh_dual_certificate();
  const std::string text = io::certificate_to_json(c);
  const ThetaDualCertificate back = io::certificate_from_json(g, text);
  EXPECT_EQ(back.t, c.t);
  EXPECT_EQ(back.lambdas, c.lambdas);
  EXPECT_EQ(back.mus, c.mus);
  EXPECT_EQ(max_abs(back.matrix.dense() - c.matrix.dense()), 0.0);
  EXPECT_EQ(io::certificate_to_json(back), text);
}

TEST(Io, CertificateMatrixMustAgree) {
  const WeightedGraph g = circulant(8, {1, 4});
  nlohmann::json j = nlohmann::json::parse(io::certificate_to_json(chsh_dual_certificate()));
  j["matrix"][1][3] = 0.25;
  try {
    io::certificate_from_json(g, j.dump());
    FAIL() << "expected CertificateMalformed";
  } catch (const CertificateMalformed& e) {
    EXPECT_EQ(e.row, 1);
    EXPECT_EQ(e.col, 3);
  }
  j = nlohmann::json::parse(io::certificate_to_json(chsh_dual_certificate()));
  j["mu"]["0-2"] = 1.0;
  EXPECT_THROW(io::certificate_from_json(g, j.dump()), InputError);
  j.erase("t");
  EXPECT_THROW(io::certificate_from_json(g, j.dump()), InputError);
}

TEST(Io, WitnessRoundTrip) {
  for (const char* name : {"chsh", "chained:3", "mermin", "as4"}) {
    const BellWitness w = witness_for(ScenarioId::parse(name));
    const std::string text = io::witness_to_json(w);
    const BellWitness back = io::witness_from_json(text);
    EXPECT_EQ(back.terms.size(), w.terms.size());
    EXPECT_EQ(exclusivity_graph(back), exclusivity_graph(w));
    EXPECT_EQ(io::witness_to_json(back), text) << name;
  }
  EXPECT_THROW(io::witness_from_json(R"({"terms": []})"), InputError);
}

TEST(Io, RealizationRoundTrip) {
  for (const char* name : {"chsh", "mermin", "as4"}) {
    const Realization r = reference_realization(ScenarioId::parse(name));
    const std::string text = io::realization_to_json(r);
    const Realization back = io::realization_from_json(text);
    EXPECT_EQ(back.dims, r.dims);
    EXPECT_EQ(back.state, r.state);
    EXPECT_EQ(back.rank_one(), r.rank_one());
    EXPECT_EQ(io::realization_to_json(back), text) << name;
  }
  nlohmann::json j = nlohmann::json::parse(io::realization_to_json(reference_realization(ScenarioId::parse("chsh"))));
  j["state"][0] = 3.0;
  EXPECT_THROW(io::realization_from_json(j.dump()), InputError);
}

TEST(Io, SdpAndReports) {
  const WeightedGraph g = circulant(8, {1, 4});
  const nlohmann::json p = nlohmann::json::parse(io::sdp_problem_to_json(theta_problem(g)));
  EXPECT_EQ(p["dim"], 9);
  EXPECT_EQ(p["constraints"].size(), 1u + 8u + 12u);
  const ThetaResult th = lovasz_theta(g);
  const nlohmann::json s = nlohmann::json::parse(io::sdp_solution_to_json(th.solution));
  EXPECT_NEAR(s["value"].get<double>(), th.value, 0.0);

  const SelfTestReference ref = prepare_reference(ScenarioId::parse("mermin"));
  const nlohmann::json c = nlohmann::json::parse(io::conditions_to_json(ref.conditions, ref.structure));
  EXPECT_FALSE(c["verdicts"]["A5"]["holds"].get<bool>());
  EXPECT_TRUE(c["verdicts"]["A7"]["holds"].get<bool>());
  EXPECT_TRUE(c.contains("a6"));
  const nlohmann::json r = nlohmann::json::parse(io::selftest_report_to_json(run_selftest(ref, ref.realization)));
  EXPECT_EQ(r["path"], "tripartite-rank1");
  EXPECT_EQ(r["isometries"].size(), 3u);
}
