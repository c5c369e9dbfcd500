#include <algorithm>
#include <charconv>
#include <set>

#include "bellgraph/errors.hpp"
#include "bellgraph/scenario.hpp"

namespace bellgraph {

void BellScenario::validate() const {
  if (parties < 1) throw InputError("scenario: at least one party required");
  if (static_cast<int>(settings.size()) != parties || static_cast<int>(outcomes.size()) != parties) {
    throw InputError("scenario: settings/outcomes must list one count per party");
  }
  for (int p = 0; p < parties; ++p) {
    if (settings[p] < 1 || outcomes[p] < 1) throw InputError("scenario: counts must be positive");
  }
  if (!outcome_values.empty()) {
    for (int p = 0; p < parties; ++p) {
      if (outcomes[p] != static_cast<int>(outcome_values.size())) {
        throw InputError("scenario: outcome_values must cover every outcome label");
      }
    }
  }
}

void BellWitness::validate() const {
  scenario.validate();
  std::set<Event> seen;
  for (const WitnessTerm& t : terms) {
    if (!(t.weight > 0.0)) throw InputError("witness: weights must be strictly positive");
    const Event& e = t.event;
    if (static_cast<int>(e.a.size()) != scenario.parties ||
        static_cast<int>(e.x.size()) != scenario.parties) {
      throw InputError("witness: event arity does not match party count");
    }
    for (int p = 0; p < scenario.parties; ++p) {
      if (e.a[p] < 0 || e.a[p] >= scenario.outcomes[p] || e.x[p] < 0 ||
          e.x[p] >= scenario.settings[p]) {
        throw InputError("witness: event label out of range");
      }
    }
    if (!seen.insert(e).second) throw InputError("witness: repeated event");
  }
}

bool exclusive(const Event& e, const Event& f) {
  for (std::size_t p = 0; p < e.x.size() && p < f.x.size(); ++p) {
    if (e.x[p] == f.x[p] && e.a[p] != f.a[p]) return true;
  }
  return false;
}

WeightedGraph exclusivity_graph(const BellWitness& wit) {
  const int n = static_cast<int>(wit.terms.size());
  std::vector<Edge> edges;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = wit.terms[i].weight;
    for (int j = i + 1; j < n; ++j) {
      if (exclusive(wit.terms[i].event, wit.terms[j].event)) edges.emplace_back(i, j);
    }
  }
  return WeightedGraph(n, std::move(edges), std::move(w));
}

BellScenario binary_scenario(int parties, int settings) {
  BellScenario s;
  s.parties = parties;
  s.settings.assign(parties, settings);
  s.outcomes.assign(parties, 2);
  s.outcome_values = {1, -1};
  return s;
}

ProbabilityExpansion correlator_to_probability_terms(int sign, int x, int y,
                                                     const BellScenario& scenario) {
  if (sign != 1 && sign != -1) throw InputError("correlator: sign must be +1 or -1");
  if (scenario.parties != 2 || scenario.outcomes[0] != 2 || scenario.outcomes[1] != 2 ||
      scenario.outcome_values.size() != 2 ||
      scenario.outcome_values[0] * scenario.outcome_values[1] != -1) {
    throw InputError("correlator: requires two parties with binary +1/-1 outcomes");
  }
  if (x < 0 || x >= scenario.settings[0] || y < 0 || y >= scenario.settings[1]) {
    throw InputError("correlator: setting out of range");
  }
  ProbabilityExpansion out;
  out.offset = -1.0;
  // Label pairs whose value product equals sign, in label order.
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (scenario.outcome_values[a] * scenario.outcome_values[b] == sign) {
        out.terms.push_back({Event{{a, b}, {x, y}}, 2.0});
      }
    }
  }
  return out;
}

BellWitness chsh_witness() {
  BellWitness w;
  w.name = "chsh";
  w.scenario = binary_scenario(2, 2);
  const int events[8][4] = {{0, 0, 0, 0}, {1, 1, 0, 1}, {1, 0, 1, 1}, {0, 0, 1, 0},
                            {1, 1, 0, 0}, {0, 0, 0, 1}, {0, 1, 1, 1}, {1, 1, 1, 0}};
  for (const auto& e : events) w.terms.push_back({Event{{e[0], e[1]}, {e[2], e[3]}}, 1.0});
  w.classical_bound = 3.0;
  return w;
}

BellWitness chained_witness(int N) {
  if (N < 2) throw InputError("chained_witness: N must be at least 2");
  BellWitness w;
  w.name = "chained:" + std::to_string(N);
  w.scenario = binary_scenario(2, N);
  // Alice's A_1, A_3, ... are settings 0..N-1; Bob's B_2, B_4, ... likewise.
  std::vector<std::pair<int, std::pair<int, int>>> correlators;
  for (int k = 0; k < 2 * N - 1; ++k) correlators.push_back({1, {(k + 1) / 2, k / 2}});
  correlators.push_back({-1, {0, N - 1}});
  double offset = 0.0;
  for (const auto& [sign, xy] : correlators) {
    ProbabilityExpansion e = correlator_to_probability_terms(sign, xy.first, xy.second, w.scenario);
    for (WitnessTerm t : e.terms) {
      t.weight /= 2.0;
      w.terms.push_back(t);
    }
    offset += e.offset;
  }
  // I_Bell = 2 I_CSW + offset and I_Bell <= 2N - 2.
  w.classical_bound = (2.0 * N - 2.0 - offset) / 2.0;
  w.affine_scale = 2.0;
  w.affine_offset = offset;
  return w;
}

const std::vector<std::string>& mermin_event_names() {
  static const std::vector<std::string> names = {"ZPP", "OMP", "OPM", "ZMM", "PZP", "MOP",
                                                 "MZM", "POM", "PPZ", "MMZ", "MPO", "PMO",
                                                 "OOO", "ZZO", "ZOZ", "OZZ"};
  return names;
}

namespace {

// Z and O are the +1/-1 outcomes of setting 0, P and M those of setting 1.
std::pair<int, int> mermin_letter(char c) {
  switch (c) {
    case 'Z': return {0, 0};
    case 'O': return {0, 1};
    case 'P': return {1, 0};
    case 'M': return {1, 1};
  }
  throw InputError(std::string("mermin: unknown letter ") + c);
}

}  // namespace

BellWitness mermin_witness() {
  BellWitness w;
  w.name = "mermin";
  w.scenario = binary_scenario(3, 2);
  for (const std::string& s : mermin_event_names()) {
    Event e;
    for (char c : s) {
      auto [x, a] = mermin_letter(c);
      e.x.push_back(x);
      e.a.push_back(a);
    }
    w.terms.push_back({e, 1.0});
  }
  w.classical_bound = 3.0;
  w.affine_scale = 2.0;
  w.affine_offset = -4.0;
  return w;
}

BellWitness as4_witness() {
  BellWitness w;
  w.name = "as4";
  w.scenario = binary_scenario(2, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i + j < 4) {
        w.terms.push_back({Event{{0, 0}, {i, j}}, 1.0});
        w.terms.push_back({Event{{1, 1}, {i, j}}, 1.0});
      } else if (i + j == 4) {
        // -min{i,j} <A_i B_j> contributes the anti-correlated events.
        const double m = std::min(i, j);
        w.terms.push_back({Event{{0, 1}, {i, j}}, m});
        w.terms.push_back({Event{{1, 0}, {i, j}}, m});
      }
    }
  }
  w.classical_bound = 10.0;
  return w;
}

ScenarioId ScenarioId::parse(std::string_view name) {
  if (name == "chsh") return {ScenarioKind::Chsh, 0};
  if (name == "mermin") return {ScenarioKind::Mermin, 0};
  if (name == "as4") return {ScenarioKind::As4, 0};
  constexpr std::string_view prefix = "chained:";
  if (name.substr(0, prefix.size()) == prefix) {
    std::string_view digits = name.substr(prefix.size());
    int n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw InputError("scenario: cannot parse N in '" + std::string(name) + "'");
    }
    if (n < 2) throw InputError("scenario: chained N must be at least 2");
    return {ScenarioKind::Chained, n};
  }
  throw InputError("scenario: unknown name '" + std::string(name) +
                   "' (expected chsh, chained:N, mermin, as4)");
}

std::string ScenarioId::str() const {
  switch (kind) {
    case ScenarioKind::Chsh: return "chsh";
    case ScenarioKind::Chained: return "chained:" + std::to_string(n);
    case ScenarioKind::Mermin: return "mermin";
    case ScenarioKind::As4: return "as4";
  }
  return "";
}

BellWitness witness_for(const ScenarioId& id) {
  switch (id.kind) {
    case ScenarioKind::Chsh: return chsh_witness();
    case ScenarioKind::Chained: return chained_witness(id.n);
    case ScenarioKind::Mermin: return mermin_witness();
    case ScenarioKind::As4: return as4_witness();
  }
  throw InputError("scenario: unknown kind");
}

WeightedGraph shrikhande_complement() { return exclusivity_graph(mermin_witness()); }

WeightedGraph shrikhande_graph() {
  const int steps[6][2] = {{1, 0}, {3, 0}, {0, 1}, {0, 3}, {1, 1}, {3, 3}};
  std::set<Edge> edges;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      int u = 4 * a + b;
      for (const auto& s : steps) {
        int v = 4 * ((a + s[0]) % 4) + (b + s[1]) % 4;
        edges.emplace(std::min(u, v), std::max(u, v));
      }
    }
  }
  return WeightedGraph(16, {edges.begin(), edges.end()});
}

}  // namespace bellgraph
