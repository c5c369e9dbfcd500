#include <gtest/gtest.h>

#include "bellgraph/errors.hpp"
#include "bellgraph/graph.hpp"
#include "bellgraph/scenario.hpp"
#include "test_util.hpp"

using namespace bellgraph;
using bellgraph::testing::brute_force_alpha;
using bellgraph::testing::random_graph;
using bellgraph::testing::random_permutation;

TEST(Graph, ConstructorRejectsBadInput) {
  EXPECT_THROW(WeightedGraph(3, {{0, 0}}), InputError);
  EXPECT_THROW(WeightedGraph(3, {{0, 3}}), InputError);
  EXPECT_THROW(WeightedGraph(3, {{0, 1}, {1, 0}}), InputError);
  EXPECT_THROW(WeightedGraph(2, {}, {1.0}), InputError);
  EXPECT_THROW(WeightedGraph(2, {}, {1.0, -1.0}), InputError);
}

TEST(Graph, EdgesAreNormalized) {
  const WeightedGraph g(4, {{3, 1}, {2, 0}});
  ASSERT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.edges()[0], Edge(0, 2));
  EXPECT_EQ(g.edges()[1], Edge(1, 3));
  EXPECT_TRUE(g.adjacent(3, 1));
  EXPECT_FALSE(g.adjacent(0, 1));
}

TEST(Circulant, Examples) {
  const WeightedGraph c8 = circulant(8, {1, 4});
  EXPECT_EQ(c8.edges().size(), 12u);
  for (int v = 0; v < 8; ++v) EXPECT_EQ(c8.degree(v), 3);
  EXPECT_EQ(circulant(5, {1}).edges().size(), 5u);
  EXPECT_EQ(circulant(12, {1, 6}).edges().size(), 18u);
}

TEST(MobiusLadder, Examples) {
  EXPECT_TRUE(find_isomorphism(mobius_ladder(2), circulant(8, {1, 4})).has_value());
  const WeightedGraph m3 = mobius_ladder(3);
  EXPECT_EQ(m3.n(), 12);
  EXPECT_EQ(m3.edges().size(), 18u);
  EXPECT_THROW(mobius_ladder(1), InputError);
}

TEST(Complement, Examples) {
  EXPECT_EQ(complement(complete_graph(4)), empty_graph(4));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const WeightedGraph g = random_graph(9, 0.4, rng, true);
    EXPECT_EQ(complement(complement(g)), g);
    EXPECT_EQ(g.edges().size() + complement(g).edges().size(), 36u);
  }
}

TEST(Shrikhande, ComplementStructure) {
  const WeightedGraph s = shrikhande_graph();
  const WeightedGraph gm = shrikhande_complement();
  ASSERT_EQ(gm.n(), 16);
  for (int v = 0; v < 16; ++v) {
    EXPECT_EQ(s.degree(v), 6);
    EXPECT_EQ(gm.degree(v), 9);
  }
  EXPECT_TRUE(find_isomorphism(complement(s), gm).has_value());
  // Independent construction from the Cayley-graph definition.
  EXPECT_TRUE(find_isomorphism(complement(bellgraph::testing::shrikhande_by_definition()), gm).has_value());
  EXPECT_DOUBLE_EQ(independence_number(gm).value, 3.0);
}

TEST(Shrikhande, MatchesMerminExclusivityGraph) {
  EXPECT_EQ(exclusivity_graph(mermin_witness()), shrikhande_complement());
}

TEST(IndependenceNumber, Examples) {
  EXPECT_DOUBLE_EQ(independence_number(circulant(8, {1, 4})).value, 3.0);
  for (int n = 1; n <= 7; ++n) EXPECT_DOUBLE_EQ(independence_number(complete_graph(n)).value, 1.0);
  EXPECT_DOUBLE_EQ(independence_number(empty_graph(6)).value, 6.0);
  EXPECT_DOUBLE_EQ(independence_number(exclusivity_graph(as4_witness())).value, 10.0);
}

TEST(IndependenceNumber, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> nd(1, 12);
  std::uniform_real_distribution<double> pd(0.1, 0.8);
  for (int t = 0; t < 60; ++t) {
    const WeightedGraph g = random_graph(nd(rng), pd(rng), rng, true);
    const StableSet s = independence_number(g);
    EXPECT_NEAR(s.value, brute_force_alpha(g), 1e-12);
    EXPECT_TRUE(is_stable(g, s.vertices));
    double w = 0.0;
    for (int v : s.vertices) w += g.weight(v);
    EXPECT_NEAR(w, s.value, 1e-12);
  }
}

TEST(IndependenceNumber, WitnessIsLexicographicallySmallest) {
  // C_5: optimal sets are pairs at distance 2; the first is {0, 2}.
  const StableSet s = independence_number(circulant(5, {1}));
  EXPECT_EQ(s.vertices, (std::vector<int>{0, 2}));
}

TEST(IndependenceNumber, RejectsLargeGraphs) {
  EXPECT_THROW(independence_number(empty_graph(kMaxBitsetVertices + 1)), ResourceError);
}

TEST(CliqueHelpers, StableAndClique) {
  const WeightedGraph k4 = complete_graph(4);
  EXPECT_TRUE(is_clique(k4, {0, 1, 3}));
  EXPECT_FALSE(is_stable(k4, {0, 1}));
  EXPECT_TRUE(is_stable(empty_graph(3), {0, 1, 2}));
  EXPECT_EQ(maximal_cliques(circulant(8, {1, 4})).cliques.size(), 12u);
  EXPECT_EQ(maximal_cliques(complete_graph(5)).cliques.size(), 1u);
}

TEST(FractionalPacking, Examples) {
  EXPECT_NEAR(fractional_packing(shrikhande_complement()), 4.0, 1e-9);
  EXPECT_NEAR(fractional_packing(exclusivity_graph(as4_witness())), 14.0, 1e-9);
  for (int n = 1; n <= 6; ++n) EXPECT_NEAR(fractional_packing(empty_graph(n)), n, 1e-12);
  EXPECT_NEAR(fractional_packing(complete_graph(5)), 1.0, 1e-12);
  EXPECT_NEAR(fractional_packing(circulant(5, {1})), 2.5, 1e-12);
  // Triangle-free with a perfect matching: every edge is a maximal clique and x = 1/2 is optimal.
  EXPECT_NEAR(fractional_packing(circulant(8, {1, 4})), 4.0, 1e-12);
}

TEST(FractionalPacking, BoundsAlphaFromAbove) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const WeightedGraph g = random_graph(10, 0.35, rng, true);
    EXPECT_GE(fractional_packing(g) + 1e-9, independence_number(g).value);
  }
}

TEST(Simplex, SmallLp) {
  const LpResult r = simplex_max({{1, 2}, {3, 1}}, {4, 6}, {1, 1});
  EXPECT_NEAR(r.value, 2.8, 1e-12);
  EXPECT_NEAR(r.x[0], 1.6, 1e-12);
  EXPECT_NEAR(r.x[1], 1.2, 1e-12);
  EXPECT_THROW(simplex_max({{1, -1}}, {1}, {1, 1}), InputError);
}

TEST(VertexTransitivity, Examples) {
  EXPECT_TRUE(is_vertex_transitive(shrikhande_complement()));
  EXPECT_FALSE(is_vertex_transitive(WeightedGraph(3, {{0, 1}, {1, 2}})));
  EXPECT_TRUE(is_vertex_transitive(circulant(8, {1, 4})));
  EXPECT_TRUE(is_vertex_transitive(circulant(11, {1, 3})));
  EXPECT_TRUE(is_vertex_transitive(circulant(12, {2, 5})));
  EXPECT_THROW(is_vertex_transitive(empty_graph(kMaxAutomorphismVertices + 1)), ResourceError);
}

TEST(Isomorphism, FindsRandomRelabelings) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const WeightedGraph g = random_graph(10, 0.4, rng, false);
    const std::vector<int> perm = random_permutation(10, rng);
    const WeightedGraph h = relabel(g, perm);
    const auto p = find_isomorphism(g, h);
    ASSERT_TRUE(p.has_value());
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        if (i != j) EXPECT_EQ(g.adjacent(i, j), h.adjacent((*p)[i], (*p)[j]));
      }
    }
  }
}

TEST(Isomorphism, RespectsWeights) {
  const WeightedGraph a(3, {{0, 1}}, {1.0, 1.0, 2.0});
  const WeightedGraph b(3, {{0, 1}}, {2.0, 1.0, 1.0});
  EXPECT_FALSE(find_isomorphism(a, b, true).has_value());
  EXPECT_TRUE(find_isomorphism(a, b, false).has_value());
  EXPECT_FALSE(find_isomorphism(circulant(8, {1, 4}), circulant(8, {1, 2})).has_value());
}

TEST(Relabel, RejectsNonPermutation) {
  EXPECT_THROW(relabel(empty_graph(3), {0, 0, 1}), InputError);
  EXPECT_THROW(relabel(empty_graph(3), {0, 1}), InputError);
}

TEST(Relabel, PreservesAlpha) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const WeightedGraph g = random_graph(11, 0.3, rng, true);
    const WeightedGraph h = relabel(g, random_permutation(11, rng));
    EXPECT_NEAR(independence_number(g).value, independence_number(h).value, 1e-12);
    EXPECT_NEAR(fractional_packing(g), fractional_packing(h), 1e-9);
  }
}
