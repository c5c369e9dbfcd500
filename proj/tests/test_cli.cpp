#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#ifndef BELLGRAPH_CLI_PATH
#error "BELLGRAPH_CLI_PATH must name the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("bellgraph_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

CliRun run(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = env + " '" BELLGRAPH_CLI_PATH "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

json run_json(const std::string& args, int expect_code = 0) {
  const CliRun r = run(args + " --json");
  EXPECT_EQ(r.code, expect_code) << args << "\n" << r.err;
  return json::parse(r.out);
}

}  // namespace

TEST(Cli, ThetaChsh) {
  const json j = run_json("theta --scenario chsh");
  EXPECT_EQ(j["alpha"].get<double>(), 3.0);
  EXPECT_NEAR(j["theta"].get<double>(), 2.0 + std::numbers::sqrt2, 1e-6);
  EXPECT_NEAR(j["alpha_star"].get<double>(), 4.0, 1e-9);
  EXPECT_TRUE(j["sandwich"].get<bool>());
  const CliRun human = run("theta --scenario chsh");
  EXPECT_NE(human.out.find("theta = 3.41421\n"), std::string::npos);
}

TEST(Cli, ThetaMermin) {
  const json j = run_json("theta --scenario mermin");
  EXPECT_EQ(j["alpha"].get<double>(), 3.0);
  EXPECT_NEAR(j["theta"].get<double>(), 4.0, 1e-6);
  EXPECT_NEAR(j["alpha_star"].get<double>(), 4.0, 1e-9);
}

TEST(Cli, ThetaGraphFile) {
  const fs::path g = scratch() / "empty4.json";
  write(g, R"({"n": 4, "edges": []})");
  const json j = run_json("theta --graph '" + g.string() + "'");
  EXPECT_EQ(j["alpha"].get<double>(), 4.0);
  EXPECT_NEAR(j["theta"].get<double>(), 4.0, 1e-6);
  EXPECT_NEAR(j["alpha_star"].get<double>(), 4.0, 1e-9);
}

TEST(Cli, ThetaWritesSdpAudit) {
  const fs::path audit = scratch() / "audit.json";
  run_json("theta --scenario chsh --sdp-out '" + audit.string() + "'");
  const json a = json::parse(slurp(audit));
  EXPECT_EQ(a["problem"]["dim"], 9);
  EXPECT_NEAR(a["solution"]["value"].get<double>(), 2.0 + std::numbers::sqrt2, 1e-6);
}

TEST(Cli, InputErrorsExitOne) {
  EXPECT_EQ(run("theta --scenario nope").code, 1);
  EXPECT_EQ(run("theta --graph /nonexistent/g.json").code, 1);
  EXPECT_EQ(run("theta").code, 1);
  EXPECT_EQ(run("theta --scenario chsh --graph x.json").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("theta --scenario chsh --tol -1").code, 1);
  const fs::path bad = scratch() / "bad.json";
  write(bad, "{ not json");
  const CliRun r = run("theta --graph '" + bad.string() + "'");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run("export --scenario chsh --format dot --out /nonexistent/dir/x.dot").code, 1);
}

TEST(Cli, SolverFailureExitsTwo) {
  const CliRun r = run("theta --scenario mermin --tol 1e-300");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("solver failure"), std::string::npos);
}

TEST(Cli, CertifyClosedForms) {
  const json c5 = run_json("certify --scenario chained:5");
  EXPECT_NEAR(c5["bound"].get<double>(), 5.0 * (1.0 + std::cos(std::numbers::pi / 10.0)), 1e-9);
  EXPECT_TRUE(c5["verified"].get<bool>());
  const json chsh = run_json("certify --scenario chsh");
  EXPECT_NEAR(chsh["bound"].get<double>(), 2.0 + std::numbers::sqrt2, 1e-12);
  EXPECT_GE(chsh["min_eigenvalue"].get<double>(), -1e-9);
  EXPECT_EQ(run("certify --scenario chained:1").code, 1);
  EXPECT_EQ(run("certify --scenario mermin").code, 1);
}

TEST(Cli, CertifyRoundTripsAndRejectsTampering) {
  const fs::path cert = scratch() / "cert.json";
  EXPECT_EQ(run("certify --scenario chained:3 --out '" + cert.string() + "'").code, 0);
  EXPECT_EQ(run("certify --scenario chained:3 --certificate '" + cert.string() + "'").code, 0);
  json j = json::parse(slurp(cert));
  // Shrinking every mu keeps the structure but breaks positivity.
  for (auto& [k, v] : j["mu"].items()) v = 0.0;
  j.erase("matrix");
  write(cert, j.dump());
  const CliRun r = run("certify --scenario chained:3 --certificate '" + cert.string() + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, Uniqueness) {
  const json chsh = run_json("uniqueness --scenario chsh");
  EXPECT_TRUE(chsh["nondegenerate"].get<bool>());
  EXPECT_EQ(chsh["nullspace_dim"], 0);
  const json mermin = run_json("uniqueness --scenario mermin");
  EXPECT_TRUE(mermin["nondegenerate"].get<bool>());
  EXPECT_EQ(mermin["nullspace_dim"], 0);
  const fs::path g = scratch() / "empty2.json";
  write(g, R"({"n": 2, "edges": []})");
  EXPECT_TRUE(run_json("uniqueness --graph '" + g.string() + "'")["nondegenerate"].get<bool>());
  const json as4 = run_json("uniqueness --scenario as4", 3);
  EXPECT_FALSE(as4["nondegenerate"].get<bool>());
}

TEST(Cli, SelftestRotatedCandidatePasses) {
  const fs::path cand = scratch() / "rotated.json";
  ASSERT_EQ(run("scenario --scenario chsh --candidate rotated --seed 4 --realization-out '" + cand.string() + "'").code, 0);
  const json j = run_json("selftest --scenario chsh --candidate '" + cand.string() + "'");
  EXPECT_TRUE(j["accepted"].get<bool>());
  EXPECT_EQ(j["report"]["path"], "bipartite-rank1");
}

TEST(Cli, SelftestSuboptimalCandidateExitsThree) {
  const fs::path cand = scratch() / "perturbed.json";
  ASSERT_EQ(run("scenario --scenario chsh --candidate perturbed --realization-out '" + cand.string() + "'").code, 0);
  const CliRun r = run("selftest --scenario chsh --candidate '" + cand.string() + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("Gram mismatch"), std::string::npos);
}

TEST(Cli, SelftestNamesTheFailedCondition) {
  const fs::path cand = scratch() / "chained_ancilla.json";
  ASSERT_EQ(run("scenario --scenario chained:3 --candidate ancilla --realization-out '" + cand.string() + "'").code, 0);
  const CliRun r = run("selftest --scenario chained:3 --candidate '" + cand.string() + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("A4"), std::string::npos);
}

TEST(Cli, SelftestMerminReferenceHasIdentityIsometries) {
  const json j = run_json("selftest --scenario mermin");
  EXPECT_TRUE(j["accepted"].get<bool>());
  for (const json& V : j["report"]["isometries"]) {
    for (std::size_t r = 0; r < V.size(); ++r) {
      for (std::size_t c = 0; c < V[r].size(); ++c) EXPECT_NEAR(V[r][c].get<double>(), r == c ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Cli, SelftestToleranceFromEnvironment) {
  const fs::path cand = scratch() / "ancilla.json";
  ASSERT_EQ(run("scenario --scenario mermin --candidate ancilla --realization-out '" + cand.string() + "'").code, 0);
  EXPECT_EQ(run("selftest --scenario mermin --candidate '" + cand.string() + "'").code, 0);
  // Far below double precision: the residuals cannot meet it.
  EXPECT_EQ(run("selftest --scenario mermin --candidate '" + cand.string() + "'", "THETA_SELFTEST_TOL=1e-30").code, 3);
  EXPECT_EQ(run("selftest --scenario mermin", "THETA_SELFTEST_TOL=abc").code, 1);
}

TEST(Cli, ExportArtifacts) {
  const CliRun dot = run("export --scenario mermin --format dot");
  EXPECT_EQ(dot.code, 0);
  EXPECT_EQ(std::count(dot.out.begin(), dot.out.end(), '['), 16);
  const CliRun as4 = run("export --scenario as4 --format json");
  ASSERT_EQ(as4.code, 0);
  const json j = json::parse(as4.out);
  int heavy = 0;
  for (const json& t : j["witness"]["terms"]) heavy += t["w"].get<double>() == 2.0 ? 1 : 0;
  EXPECT_EQ(heavy, 2);
  EXPECT_EQ(j["graph"]["n"], 26);
  const fs::path out = scratch() / "chsh.json";
  EXPECT_EQ(run("export --scenario chsh --format json --out '" + out.string() + "'").code, 0);
  EXPECT_TRUE(json::parse(slurp(out)).contains("certificate"));
  EXPECT_EQ(run("export --scenario chsh --format svg").code, 1);
}

TEST(Cli, ExportedGraphFeedsTheta) {
  const fs::path out = scratch() / "mermin_export.json";
  ASSERT_EQ(run("export --scenario mermin --format json --out '" + out.string() + "'").code, 0);
  const fs::path g = scratch() / "mermin_graph.json";
  write(g, json::parse(slurp(out))["graph"].dump());
  EXPECT_NEAR(run_json("theta --graph '" + g.string() + "'")["theta"].get<double>(), 4.0, 1e-6);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> cmds = {
      "theta --scenario as4 --json",        "certify --scenario chained:4 --json",
      "uniqueness --scenario mermin --json", "selftest --scenario chsh --json",
      "scenario --scenario mermin --candidate ancilla --seed 2 --json",
      "export --scenario mermin --format json", "export --scenario chsh --format dot"};
  for (const std::string& c : cmds) {
    const CliRun a = run(c), b = run(c);
    EXPECT_EQ(a.code, 0) << c;
    EXPECT_FALSE(a.out.empty()) << c;
    EXPECT_EQ(a.out, b.out) << c;
  }
}
