#include "bellgraph/io.hpp"

#include <cmath>
#include <sstream>

#include "bellgraph/errors.hpp"
#include "json.hpp"

namespace bellgraph::io {

namespace {

using nlohmann::json;

constexpr int kIndent = 2;

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

// Wraps nlohmann type errors (missing keys, wrong types) as InputError.
template <class F>
auto guarded(const char* what, F f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd read_matrix(const json& j) {
  if (!j.is_array()) throw InputError("matrix must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw InputError("matrix rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd read_vector(const json& j) {
  if (!j.is_array()) throw InputError("vector must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json graph_json(const WeightedGraph& g) {
  json edges = json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i, j});
  return {{"n", g.n()}, {"edges", edges}, {"weights", g.weights()}};
}

json label(const LocalLabel& l) { return {l.setting, l.outcome}; }

json labels(const ProductStructure& ps, int party, const std::vector<int>& idx) {
  json out = json::array();
  for (int k : idx) out.push_back(label(ps.labels[party][k]));
  return out;
}

}  // namespace

std::string graph_to_json(const WeightedGraph& g) { return graph_json(g).dump(kIndent); }

WeightedGraph graph_from_json(const std::string& text) {
  const json j = parse(text, "graph JSON");
  return guarded("graph JSON", [&] {
    std::vector<Edge> edges;
    for (const json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InputError("graph JSON: edges must be pairs");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    std::vector<double> w;
    if (j.contains("weights")) w = j.at("weights").get<std::vector<double>>();
    return WeightedGraph(j.at("n").get<int>(), std::move(edges), std::move(w));
  });
}

std::string graph_to_dot(const WeightedGraph& g, const std::string& name,
                         const std::vector<std::string>& labels) {
  std::ostringstream os;
  os.precision(17);
  os << "graph \"" << name << "\" {\n";
  for (int v = 0; v < g.n(); ++v) {
    os << "  " << v << " [label=\"" << (v < static_cast<int>(labels.size()) ? labels[v] : std::to_string(v))
       << "\", weight=" << g.weight(v) << "];\n";
  }
  for (auto [i, j] : g.edges()) os << "  " << i << " -- " << j << ";\n";
  os << "}\n";
  return os.str();
}

std::string matrix_to_json(const Eigen::MatrixXd& m) { return matrix(m).dump(kIndent); }

std::string sdp_problem_to_json(const SdpProblem& p) {
  json cons = json::array();
  for (const SdpConstraint& c : p.constraints) cons.push_back({{"a", matrix(c.a.dense())}, {"b", c.b}});
  return json{{"dim", p.dim()}, {"objective", matrix(p.objective.dense())}, {"constraints", cons}}.dump(kIndent);
}

std::string sdp_solution_to_json(const SdpSolution& s) {
  return json{{"value", s.value},
              {"dual_value", s.dual_value},
              {"gap", s.gap},
              {"primal_residual", s.primal_residual},
              {"dual_residual", s.dual_residual},
              {"iterations", s.iterations},
              {"primal", matrix(s.primal.dense())},
              {"dual_slack", matrix(s.dual_slack.dense())},
              {"y", vector(s.dual_multipliers)}}
      .dump(kIndent);
}

std::string certificate_to_json(const ThetaDualCertificate& c) {
  json mu = json::object();
  for (const auto& [e, v] : c.mus) mu[std::to_string(e.first) + "-" + std::to_string(e.second)] = v;
  return json{{"t", c.t}, {"lambda", c.lambdas}, {"mu", mu}, {"matrix", matrix(c.matrix.dense())}}.dump(kIndent);
}

ThetaDualCertificate certificate_from_json(const WeightedGraph& g, const std::string& text) {
  const json j = parse(text, "certificate JSON");
  ThetaDualCertificate c = guarded("certificate JSON", [&] {
    std::map<Edge, double> mus;
    for (const auto& [key, v] : j.at("mu").items()) {
      const auto dash = key.find('-');
      if (dash == std::string::npos) throw InputError("certificate JSON: mu keys must read i-j");
      int a = 0, b = 0;
      try {
        a = std::stoi(key.substr(0, dash));
        b = std::stoi(key.substr(dash + 1));
      } catch (const std::exception&) {
        throw InputError("certificate JSON: bad mu key '" + key + "'");
      }
      mus[{std::min(a, b), std::max(a, b)}] = v.get<double>();
    }
    return make_certificate(g, j.at("t").get<double>(), j.at("lambda").get<std::vector<double>>(),
                            std::move(mus));
  });
  if (j.contains("matrix")) {
    const Eigen::MatrixXd m = guarded("certificate JSON", [&] { return read_matrix(j.at("matrix")); });
    if (m.rows() != c.matrix.dim() || m.cols() != c.matrix.dim()) {
      throw CertificateMalformed("certificate matrix has the wrong dimension", -1, -1);
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index col = 0; col < m.cols(); ++col) {
        if (std::abs(m(r, col) - c.matrix(r, col)) > 1e-9) {
          throw CertificateMalformed("certificate matrix disagrees with t/lambda/mu at (" +
                                         std::to_string(r) + "," + std::to_string(col) + ")",
                                     static_cast<int>(r), static_cast<int>(col));
        }
      }
    }
  }
  return c;
}

std::string witness_to_json(const BellWitness& w) {
  json terms = json::array();
  for (const WitnessTerm& t : w.terms) terms.push_back({{"a", t.event.a}, {"x", t.event.x}, {"w", t.weight}});
  const json scenario = {{"parties", w.scenario.parties},
                         {"settings", w.scenario.settings},
                         {"outcomes", w.scenario.outcomes},
                         {"outcome_values", w.scenario.outcome_values}};
  return json{{"name", w.name},
              {"scenario", scenario},
              {"terms", terms},
              {"classical_bound", w.classical_bound},
              {"affine_scale", w.affine_scale},
              {"affine_offset", w.affine_offset}}
      .dump(kIndent);
}

BellWitness witness_from_json(const std::string& text) {
  const json j = parse(text, "witness JSON");
  BellWitness w = guarded("witness JSON", [&] {
    BellWitness w;
    w.name = j.value("name", std::string());
    const json& s = j.at("scenario");
    w.scenario.parties = s.at("parties").get<int>();
    w.scenario.settings = s.at("settings").get<std::vector<int>>();
    w.scenario.outcomes = s.at("outcomes").get<std::vector<int>>();
    if (s.contains("outcome_values")) w.scenario.outcome_values = s.at("outcome_values").get<std::vector<int>>();
    for (const json& t : j.at("terms")) {
      w.terms.push_back({Event{t.at("a").get<std::vector<int>>(), t.at("x").get<std::vector<int>>()},
                         t.value("w", 1.0)});
    }
    w.classical_bound = j.value("classical_bound", 0.0);
    w.affine_scale = j.value("affine_scale", 1.0);
    w.affine_offset = j.value("affine_offset", 0.0);
    return w;
  });
  w.validate();
  return w;
}

std::string realization_to_json(const Realization& r) {
  json projectors = json::array();
  for (const auto& settings : r.projectors) {
    json ps = json::array();
    for (const auto& outs : settings) {
      json os = json::array();
      for (const Eigen::MatrixXd& P : outs) os.push_back(matrix(P));
      ps.push_back(std::move(os));
    }
    projectors.push_back(std::move(ps));
  }
  json j = {{"dims", r.dims}, {"state", vector(r.state)}, {"projectors", projectors}};
  if (r.rank_one()) {
    json vs = json::array();
    for (const auto& settings : r.vectors) {
      json ps = json::array();
      for (const auto& outs : settings) {
        json os = json::array();
        for (const Eigen::VectorXd& v : outs) os.push_back(vector(v));
        ps.push_back(std::move(os));
      }
      vs.push_back(std::move(ps));
    }
    j["vectors"] = vs;
  }
  return j.dump(kIndent);
}

Realization realization_from_json(const std::string& text) {
  const json j = parse(text, "realization JSON");
  Realization r = guarded("realization JSON", [&] {
    Realization r;
    r.dims = j.at("dims").get<std::vector<int>>();
    r.state = read_vector(j.at("state"));
    for (const json& settings : j.at("projectors")) {
      std::vector<std::vector<Eigen::MatrixXd>> ps;
      for (const json& outs : settings) {
        std::vector<Eigen::MatrixXd> os;
        for (const json& P : outs) os.push_back(read_matrix(P));
        ps.push_back(std::move(os));
      }
      r.projectors.push_back(std::move(ps));
    }
    if (j.contains("vectors")) {
      for (const json& settings : j.at("vectors")) {
        std::vector<std::vector<Eigen::VectorXd>> ps;
        for (const json& outs : settings) {
          std::vector<Eigen::VectorXd> os;
          for (const json& v : outs) os.push_back(read_vector(v));
          ps.push_back(std::move(os));
        }
        r.vectors.push_back(std::move(ps));
      }
    }
    return r;
  });
  r.validate();
  return r;
}

std::string conditions_to_json(const ConditionReport& c, const ProductStructure& ps) {
  json verdicts = json::object();
  for (const auto& [name, v] : c.verdicts) verdicts[name] = {{"holds", v.holds}, {"reason", v.reason}};
  json j = {{"party_count", c.party_count}, {"span_rank", c.span_rank}, {"verdicts", verdicts}};
  if (c.a2) {
    json inner = json::array();
    for (const auto& set : c.a2->inner) inner.push_back(labels(ps, c.a2->inner_party, set));
    j["a2"] = {{"inner_party", c.a2->inner_party},
               {"outer_party", c.a2->outer_party},
               {"outer", labels(ps, c.a2->outer_party, c.a2->outer)},
               {"inner", inner},
               {"edges", c.a2->edges}};
  }
  if (c.a6) {
    json ibc = json::array();
    for (const auto& set : c.a6->ibc) {
      json s = json::array();
      for (auto [b, cc] : set) s.push_back({label(ps.labels[1][b]), label(ps.labels[2][cc])});
      ibc.push_back(std::move(s));
    }
    j["a6"] = {{"ia", labels(ps, 0, c.a6->ia)},
               {"ibc", ibc},
               {"edges", c.a6->edges},
               {"linked", c.a6->linked},
               {"per_element_span", c.a6->per_element_span},
               {"union_span", c.a6->union_span},
               {"connected", c.a6->connected}};
  }
  json pairings = json::array();
  for (int p = 0; p < static_cast<int>(c.pairings.size()); ++p) {
    json pp = json::array();
    for (const auto& pr : c.pairings[p]) pp.push_back({label(ps.labels[p][pr[0]]), label(ps.labels[p][pr[1]])});
    pairings.push_back(std::move(pp));
  }
  j["pairings"] = pairings;
  return j.dump(kIndent);
}

std::string selftest_report_to_json(const SelfTestReport& r) {
  json isos = json::array();
  for (const Eigen::MatrixXd& V : r.isometries) isos.push_back(matrix(V));
  return json{{"path", r.path},
              {"isometries", isos},
              {"junk_dims", r.junk_dims},
              {"junk", vector(r.junk)},
              {"state_residual", r.state_residual},
              {"vector_residuals", r.vector_residuals},
              {"alpha", r.alpha},
              {"gamma", r.gamma}}
      .dump(kIndent);
}

}  // namespace bellgraph::io
