#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bellgraph/graph.hpp"

namespace bellgraph {

struct BellScenario {
  int parties = 0;
  std::vector<int> settings;  // k_j per party
  std::vector<int> outcomes;  // K_j per party
  // Optional +1/-1 value of each outcome label, shared by all parties; empty
  // when the scenario has no correlator interpretation.
  std::vector<int> outcome_values;

  void validate() const;
};

// Outcome labels a and setting labels x, one per party.
struct Event {
  std::vector<int> a;
  std::vector<int> x;

  friend bool operator==(const Event&, const Event&) = default;
  friend auto operator<=>(const Event&, const Event&) = default;
};

struct WitnessTerm {
  Event event;
  double weight = 1.0;
};

struct BellWitness {
  std::string name;
  BellScenario scenario;
  std::vector<WitnessTerm> terms;
  double classical_bound = 0.0;
  // Operator form of the witness: scale * sum_i w_i p_i + offset.
  double affine_scale = 1.0;
  double affine_offset = 0.0;

  // Throws InputError on nonpositive weights, repeated events or labels out of range.
  void validate() const;
};

// Exclusive iff some party uses the same setting with a different outcome.
bool exclusive(const Event& e, const Event& f);

WeightedGraph exclusivity_graph(const BellWitness& wit);

struct ProbabilityExpansion {
  std::vector<WitnessTerm> terms;
  double offset = 0.0;
};

// sign * <A_x B_y> = 2 [P(agree or disagree) events] - 1, with outcome labels
// taken from scenario.outcome_values (0 -> +1, 1 -> -1 for built-ins).
ProbabilityExpansion correlator_to_probability_terms(int sign, int x, int y,
                                                     const BellScenario& scenario);

BellScenario binary_scenario(int parties, int settings);

BellWitness chsh_witness();
BellWitness chained_witness(int N);
BellWitness mermin_witness();
BellWitness as4_witness();

enum class ScenarioKind { Chsh, Chained, Mermin, As4 };

struct ScenarioId {
  ScenarioKind kind = ScenarioKind::Chsh;
  int n = 0;  // N for the chained family

  // Accepts chsh, chained:N, mermin, as4. Throws InputError otherwise.
  static ScenarioId parse(std::string_view name);
  std::string str() const;
};

BellWitness witness_for(const ScenarioId& id);

// Mermin event names in witness order, over the letters Z, O, P, M.
const std::vector<std::string>& mermin_event_names();

// G_M derived from the Mermin events by the exclusivity rule.
WeightedGraph shrikhande_complement();
// Cayley graph of Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)}.
WeightedGraph shrikhande_graph();

}  // namespace bellgraph
