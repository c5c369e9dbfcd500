// Command-line front end. Exit codes: 0 success, 1 input error, 2 solver
// failure, 3 rejection (self-test, certificate or uniqueness verdict).

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bellgraph/errors.hpp"
#include "bellgraph/graph.hpp"
#include "bellgraph/io.hpp"
#include "bellgraph/realization.hpp"
#include "bellgraph/scenario.hpp"
#include "bellgraph/selftest.hpp"
#include "bellgraph/theta.hpp"
#include "json.hpp"

namespace {

using namespace bellgraph;
using nlohmann::json;

enum Exit { kOk = 0, kInput = 1, kSolver = 2, kRejected = 3 };

struct Common {
  bool json_out = false;
  double tol = 1e-9;
  double psd_tol = kPsdTolerance;
  double null_tol = kNullspaceThreshold;
  double overlap_tol = 1e-8;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// Graph from --scenario or --graph.
struct GraphInput {
  std::string scenario;
  std::string graph_path;

  WeightedGraph load() const {
    if (scenario.empty() == graph_path.empty()) throw InputError("give exactly one of --scenario and --graph");
    if (!scenario.empty()) return exclusivity_graph(witness_for(ScenarioId::parse(scenario)));
    return io::graph_from_json(read_file(graph_path));
  }
  std::string label() const { return scenario.empty() ? graph_path : scenario; }
};

std::vector<std::string> event_labels(const BellWitness& w) {
  std::vector<std::string> out;
  if (w.name == "mermin") return mermin_event_names();
  for (const WitnessTerm& t : w.terms) {
    std::string s;
    for (int a : t.event.a) s += std::to_string(a);
    s += "|";
    for (int x : t.event.x) s += std::to_string(x);
    out.push_back(s);
  }
  return out;
}

// Closed-form duals live on Ci_8(1,4) and the Mobius ladder in circulant
// order; they are carried over to the witness graph's event order.
std::optional<ThetaDualCertificate> closed_form_certificate(const ScenarioId& id) {
  WeightedGraph native;
  ThetaDualCertificate cert;
  if (id.kind == ScenarioKind::Chsh) {
    native = circulant(8, {1, 4});
    cert = chsh_dual_certificate();
  } else if (id.kind == ScenarioKind::Chained) {
    native = mobius_ladder(id.n);
    cert = chained_dual_certificate(id.n);
  } else {
    return std::nullopt;
  }
  const WeightedGraph g = exclusivity_graph(witness_for(id));
  const auto perm = find_isomorphism(native, g, true);
  if (!perm) throw InputError("closed-form dual does not match the exclusivity graph of " + id.str());
  return relabel_certificate(native, cert, *perm);
}

int cmd_theta(const Common& c, const GraphInput& in, const std::string& sdp_out) {
  const WeightedGraph g = in.load();
  ThetaOptions opts;
  opts.tol = c.tol;
  const ThetaResult th = lovasz_theta(g, opts);
  const StableSet alpha = independence_number(g);
  const double astar = fractional_packing(g);
  const bool sandwich = alpha.value <= th.value + 1e-6 && th.value <= astar + 1e-6;
  if (!sdp_out.empty()) {
    json audit = {{"problem", json::parse(io::sdp_problem_to_json(theta_problem(g)))},
                  {"solution", json::parse(io::sdp_solution_to_json(th.solution))}};
    write_file(sdp_out, audit.dump(2) + "\n");
  }
  if (c.json_out) {
    emit({{"input", in.label()},
          {"n", g.n()},
          {"alpha", alpha.value},
          {"alpha_set", alpha.vertices},
          {"theta", th.value},
          {"alpha_star", astar},
          {"sandwich", sandwich},
          {"iterations", th.solution.iterations}});
  } else {
    std::cout << "graph: " << in.label() << " (" << g.n() << " vertices, " << g.edges().size()
              << " edges)\n"
              << "alpha = " << fmt(alpha.value) << "\n"
              << "theta = " << fmt(th.value) << "\n"
              << "alpha* = " << fmt(astar) << "\n"
              << "sandwich alpha <= theta <= alpha*: " << (sandwich ? "ok" : "VIOLATED") << "\n";
  }
  return kOk;
}

int cmd_certify(const Common& c, const std::string& scenario, const std::string& cert_path,
                const std::string& out_path) {
  const ScenarioId id = ScenarioId::parse(scenario);
  const WeightedGraph g = exclusivity_graph(witness_for(id));
  ThetaDualCertificate cert;
  if (!cert_path.empty()) {
    cert = io::certificate_from_json(g, read_file(cert_path));
  } else {
    auto cf = closed_form_certificate(id);
    if (!cf) throw InputError("certify: no closed-form certificate for " + scenario + " (use chsh or chained:N)");
    cert = *cf;
  }
  if (!out_path.empty()) write_file(out_path, io::certificate_to_json(cert) + "\n");
  CertificateOptions opts;
  opts.psd_tol = c.psd_tol;
  const double lmin = min_eigenvalue(cert.matrix);
  bool ok = true;
  std::string reason;
  double bound = cert.t;
  try {
    bound = verify_dual_certificate(g, cert, opts);
  } catch (const CertificateMalformed& e) {
    ok = false;
    reason = e.what();
  } catch (const NotPsd& e) {
    ok = false;
    reason = e.what();
  }
  if (c.json_out) {
    emit({{"scenario", id.str()},
          {"bound", bound},
          {"min_eigenvalue", lmin},
          {"verified", ok},
          {"reason", reason},
          {"certificate", json::parse(io::certificate_to_json(cert))}});
  } else {
    std::cout << "scenario: " << id.str() << "\n"
              << "certified bound = " << fmt(bound) << "\n"
              << "min eigenvalue = " << fmt(lmin) << "\n"
              << "verification: " << (ok ? "pass" : "FAIL (" + reason + ")") << "\n";
  }
  return ok ? kOk : kRejected;
}

int cmd_uniqueness(const Common& c, const GraphInput& in, const std::string& cert_path) {
  const WeightedGraph g = in.load();
  UniquenessVerdict v;
  std::string source;
  if (!cert_path.empty()) {
    v = dual_nondegenerate(g, io::certificate_from_json(g, read_file(cert_path)).matrix, c.null_tol);
    source = "supplied";
  } else if (auto cf = in.scenario.empty() ? std::nullopt : closed_form_certificate(ScenarioId::parse(in.scenario))) {
    v = dual_nondegenerate(g, cf->matrix, c.null_tol);
    source = "closed-form";
  } else {
    ThetaOptions opts;
    opts.tol = c.tol;
    v = solved_dual_nondegenerate(g, lovasz_theta(g, opts).solution, c.tol, c.null_tol);
    source = "solved";
  }
  if (c.json_out) {
    emit({{"input", in.label()},
          {"dual_source", source},
          {"nondegenerate", v.nondegenerate},
          {"nullspace_dim", v.nullspace_dim},
          {"residual", v.residual}});
  } else {
    std::cout << "graph: " << in.label() << "\n"
              << "dual: " << source << "\n"
              << "verdict: " << (v.nondegenerate ? "nondegenerate (unique primal optimizer)" : "degenerate")
              << "\n"
              << "null-space dimension = " << v.nullspace_dim << "\n";
  }
  return v.nondegenerate ? kOk : kRejected;
}

double selftest_tolerance() {
  const char* env = std::getenv("THETA_SELFTEST_TOL");
  if (env == nullptr || *env == '\0') return 1e-7;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) throw InputError("THETA_SELFTEST_TOL must be a positive number");
  return v;
}

int cmd_selftest(const Common& c, const std::string& scenario, const std::string& cand_path) {
  const double tol = selftest_tolerance();
  const ScenarioId id = ScenarioId::parse(scenario);
  ConditionOptions co;
  co.overlap_tol = c.overlap_tol;
  const SelfTestReference ref = prepare_reference(witness_for(id), reference_realization(id), co);
  const Realization cand = cand_path.empty() ? ref.realization : io::realization_from_json(read_file(cand_path));
  ExtractionOptions eo;
  eo.overlap_tol = c.overlap_tol;

  const json conditions = json::parse(io::conditions_to_json(ref.conditions, ref.structure));
  auto reject = [&](const std::string& why) {
    if (c.json_out) {
      emit({{"scenario", id.str()}, {"conditions", conditions}, {"accepted", false}, {"reason", why}});
    } else {
      std::cout << "scenario: " << id.str() << "\nrejected: " << why << "\n";
    }
    std::cerr << "selftest rejected: " << why << "\n";
    return kRejected;
  };

  SelfTestReport rep;
  try {
    rep = run_selftest(ref, cand, eo);
  } catch (const PreconditionError& e) {
    return reject(e.what());
  } catch (const NotAnOptimizer& e) {
    return reject(e.what());
  }
  const bool ok = verify_selftest_claim(ref, cand, rep, tol);
  double worst = 0.0;
  for (double r : rep.vector_residuals) worst = std::max(worst, r);
  if (c.json_out) {
    emit({{"scenario", id.str()},
          {"conditions", conditions},
          {"report", json::parse(io::selftest_report_to_json(rep))},
          {"tolerance", tol},
          {"accepted", ok}});
  } else {
    std::cout << "scenario: " << id.str() << "\n"
              << "path: " << rep.path << "\n"
              << "junk dimensions:";
    for (int k : rep.junk_dims) std::cout << " " << k;
    std::cout << "\nstate residual = " << fmt(rep.state_residual) << "\n"
              << "max event residual = " << fmt(worst) << "\n"
              << "verification at " << fmt(tol) << ": " << (ok ? "pass" : "FAIL") << "\n";
  }
  if (!ok) std::cerr << "selftest rejected: residuals exceed " << tol << "\n";
  return ok ? kOk : kRejected;
}

Realization make_candidate(const Realization& ref, const std::string& kind, std::uint64_t seed) {
  const int n = ref.parties();
  if (kind == "reference") return ref;
  if (kind == "rotated" || kind == "padded") {
    std::vector<Eigen::MatrixXd> maps;
    for (int p = 0; p < n; ++p) {
      maps.push_back(kind == "rotated" ? random_orthogonal(ref.dims[p], seed * 7919 + p)
                                       : random_isometry(ref.dims[p], 1, seed * 7919 + p));
    }
    return transform_realization(ref, maps);
  }
  if (kind == "ancilla") {
    std::vector<int> kd(n, 2);
    Eigen::VectorXd junk(1 << n);
    for (int k = 0; k < junk.size(); ++k) junk(k) = 1.0 + k;
    junk.normalize();
    std::vector<std::vector<Eigen::MatrixXd>> rots(n);
    for (int p = 0; p < n; ++p) {
      for (int j = 0; j < 2; ++j) rots[p].push_back(random_orthogonal(ref.dims[p], seed * 7919 + 31 * p + j));
    }
    return with_ancilla(ref, kd, junk, rots);
  }
  if (kind == "perturbed") return perturb_setting(ref, 0, 1, 0.2);
  throw InputError("unknown candidate kind '" + kind + "' (reference, rotated, padded, ancilla, perturbed)");
}

int cmd_scenario(const Common& c, const std::string& scenario, const std::string& kind,
                 std::uint64_t seed, const std::string& witness_out, const std::string& real_out) {
  const ScenarioId id = ScenarioId::parse(scenario);
  const BellWitness w = witness_for(id);
  const Realization r = make_candidate(reference_realization(id), kind, seed);
  if (!witness_out.empty()) write_file(witness_out, io::witness_to_json(w) + "\n");
  if (!real_out.empty()) write_file(real_out, io::realization_to_json(r) + "\n");
  const WitnessEvaluation ev = evaluate_witness(w, r);
  if (c.json_out) {
    emit({{"witness", json::parse(io::witness_to_json(w))},
          {"realization", json::parse(io::realization_to_json(r))},
          {"value", ev.value},
          {"operator_value", ev.operator_value}});
  } else {
    std::cout << "scenario: " << id.str() << "\n"
              << "events: " << w.terms.size() << "\n"
              << "classical bound = " << fmt(w.classical_bound) << "\n"
              << "realization (" << kind << ") value = " << fmt(ev.value)
              << " (operator form " << fmt(ev.operator_value) << ")\n"
              << "exclusivity violations: " << ev.violations.size() << "\n";
  }
  return kOk;
}

int cmd_export(const std::string& scenario, const std::string& format, const std::string& out_path) {
  const ScenarioId id = ScenarioId::parse(scenario);
  const BellWitness w = witness_for(id);
  const WeightedGraph g = exclusivity_graph(w);
  std::string text;
  if (format == "dot") {
    text = io::graph_to_dot(g, id.str(), event_labels(w));
  } else if (format == "json") {
    json j = {{"scenario", id.str()},
              {"graph", json::parse(io::graph_to_json(g))},
              {"witness", json::parse(io::witness_to_json(w))}};
    if (auto cf = closed_form_certificate(id)) j["certificate"] = json::parse(io::certificate_to_json(*cf));
    text = j.dump(2) + "\n";
  } else {
    throw InputError("unknown format '" + format + "' (json, dot)");
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exclusivity graphs, Lovasz theta certificates and Bell self-testing"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", common.json_out, "Machine-readable output");
    sub->add_option("--tol", common.tol, "SDP solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--psd-tol", common.psd_tol, "PSD threshold for certificates")->check(CLI::PositiveNumber);
    sub->add_option("--null-tol", common.null_tol, "Null-space threshold")->check(CLI::PositiveNumber);
    sub->add_option("--overlap-tol", common.overlap_tol, "Nonzero-overlap threshold")->check(CLI::PositiveNumber);
  };

  GraphInput graph_in;
  std::string scenario, cert_path, out_path, sdp_out, cand_path, format, kind = "reference";
  std::string witness_out, real_out;
  std::uint64_t seed = 1;

  auto* theta = app.add_subcommand("theta", "alpha, theta and alpha* of a graph");
  add_common(theta);
  theta->add_option("--scenario", graph_in.scenario, "Built-in scenario (chsh, chained:N, mermin, as4)");
  theta->add_option("--graph", graph_in.graph_path, "Graph JSON file");
  theta->add_option("--sdp-out", sdp_out, "Write the SDP problem and solution as JSON");

  auto* certify = app.add_subcommand("certify", "Verify a dual certificate for theta");
  add_common(certify);
  certify->add_option("--scenario", scenario, "chsh or chained:N")->required();
  certify->add_option("--certificate", cert_path, "Certificate JSON (default: closed form)");
  certify->add_option("--out", out_path, "Write the certificate JSON");

  auto* unique = app.add_subcommand("uniqueness", "Dual nondegeneracy of the theta optimizer");
  add_common(unique);
  unique->add_option("--scenario", graph_in.scenario, "Built-in scenario");
  unique->add_option("--graph", graph_in.graph_path, "Graph JSON file");
  unique->add_option("--certificate", cert_path, "Dual certificate JSON");

  auto* selftest = app.add_subcommand("selftest", "Run the self-testing pipeline on a candidate");
  add_common(selftest);
  selftest->add_option("--scenario", scenario, "Built-in scenario")->required();
  selftest->add_option("--candidate", cand_path, "Candidate realization JSON (default: reference)");

  auto* scen = app.add_subcommand("scenario", "Witness and realizations of a built-in scenario");
  add_common(scen);
  scen->add_option("--scenario", scenario, "Built-in scenario")->required();
  scen->add_option("--candidate", kind, "reference, rotated, padded, ancilla or perturbed");
  scen->add_option("--seed", seed, "Seed for generated candidates");
  scen->add_option("--witness-out", witness_out, "Write the witness JSON");
  scen->add_option("--realization-out", real_out, "Write the realization JSON");

  auto* exp = app.add_subcommand("export", "Export graph artifacts");
  exp->add_option("--scenario", scenario, "Built-in scenario")->required();
  exp->add_option("--format", format, "json or dot")->required();
  exp->add_option("--out", out_path, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (theta->parsed()) return cmd_theta(common, graph_in, sdp_out);
    if (certify->parsed()) return cmd_certify(common, scenario, cert_path, out_path);
    if (unique->parsed()) return cmd_uniqueness(common, graph_in, cert_path);
    if (selftest->parsed()) return cmd_selftest(common, scenario, cand_path);
    if (scen->parsed()) return cmd_scenario(common, scenario, kind, seed, witness_out, real_out);
    if (exp->parsed()) return cmd_export(scenario, format, out_path);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (iterations " << e.iterations << ", gap " << e.gap
              << ")\n";
    return kSolver;
  } catch (const PreconditionError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const NotAnOptimizer& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const bellgraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
