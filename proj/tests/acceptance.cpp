// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "bellgraph/errors.hpp"
#include "bellgraph/graph.hpp"
#include "bellgraph/linalg.hpp"
#include "bellgraph/realization.hpp"
#include "bellgraph/scenario.hpp"
#include "bellgraph/sdp.hpp"
#include "bellgraph/selftest.hpp"
#include "bellgraph/theta.hpp"
#include "test_util.hpp"

using namespace bellgraph;
using bellgraph::testing::brute_force_alpha;
using bellgraph::testing::max_abs;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Collects failed checks of one criterion.
class Criterion {
 public:
  explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os.precision(12);
    os << what << ": got " << got << ", want " << want << " +- " << tol;
    check(std::abs(got - want) <= tol, os.str());
  }

  bool report() const {
    std::printf("criterion %d: %s  %s (%d checks", id_, failed_ == 0 ? "PASS" : "FAIL", title_.c_str(), checks_);
    if (failed_ > 0) std::printf(", %d failed", failed_);
    std::printf(")\n");
    for (const std::string& f : failures_) std::printf("    %s\n", f.c_str());
    return failed_ == 0;
  }

 private:
  int id_;
  std::string title_;
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

template <class F>
void guarded(Criterion& c, F f) {
  try {
    f();
  } catch (const std::exception& e) {
    c.check(false, std::string("unexpected exception: ") + e.what());
  }
}

Eigen::MatrixXd chsh_primal_oracle() {
  const double chi = (2.0 + kSqrt2) / 8.0, xi = (1.0 + kSqrt2) / 8.0;
  Eigen::MatrixXd p(9, 9);
  p(0, 0) = 1.0;
  for (int i = 0; i < 8; ++i) {
    p(0, i + 1) = p(i + 1, 0) = chi;
    for (int j = 0; j < 8; ++j) {
      const int d = std::min((i - j + 8) % 8, (j - i + 8) % 8);
      p(i + 1, j + 1) = d == 0 ? chi : d == 1 ? 0.0 : d == 2 ? chi / 2.0 : d == 3 ? xi : 0.0;
    }
  }
  return p;
}

bool criterion1() {
  Criterion c(1, "CHSH theta and primal optimizer");
  guarded(c, [&] {
    const ThetaResult r = lovasz_theta(circulant(8, {1, 4}));
    c.near(r.value, 2.0 + kSqrt2, 1e-6, "theta(Ci_8(1,4))");
    const Eigen::MatrixXd oracle = chsh_primal_oracle();
    c.check(max_abs(r.primal.dense() - oracle) <= 1e-5, "primal entries");
    const GramDecomposition g = handle_gauge(gram_decompose(r.primal, 1e-7));
    c.check(max_abs(g.vectors.transpose() * g.vectors - oracle) <= 1e-5, "gauge-fixed Gram");
    c.check(g.vectors.col(0).tail(g.vectors.rows() - 1).norm() <= 1e-9, "handle on e_0");
  });
  return c.report();
}

bool criterion2() {
  Criterion c(2, "CHSH dual certificate and uniqueness");
  guarded(c, [&] {
    const WeightedGraph g = circulant(8, {1, 4});
    const ThetaDualCertificate z = chsh_dual_certificate();
    c.near(verify_dual_certificate(g, z), 2.0 + kSqrt2, 1e-12, "certified bound");
    const double lmin = min_eigenvalue(z.matrix);
    c.check(lmin >= -1e-9 && lmin <= 1e-9, "min eigenvalue in [-1e-9, 1e-9]");
    const UniquenessVerdict v = dual_nondegenerate(g, z.matrix);
    c.check(v.nondegenerate && v.nullspace_dim == 0, "null-space dimension 0");
  });
  return c.report();
}

bool criterion3() {
  Criterion c(3, "chained family theta, dual certificates and circulant spectra");
  guarded(c, [&] {
    for (int N = 2; N <= 8; ++N) {
      const SdpSolution s = solve_sdp(theta_problem(circulant(4 * N, {1, 2 * N})), 1e-9);
      c.near(s.value, N * (1.0 + std::cos(std::numbers::pi / (2.0 * N))), 1e-6, "theta N=" + std::to_string(N));
    }
    for (int N = 2; N <= 16; ++N) {
      const std::string tag = " N=" + std::to_string(N);
      const double k = std::cos(std::numbers::pi / (2.0 * N)), f = (1 - k) / (1 + k), l = 1 / (1 + k);
      const WeightedGraph g = mobius_ladder(N);
      const ThetaDualCertificate z = chained_dual_certificate(N);
      c.check(min_eigenvalue(z.matrix) >= -1e-9, "Z_N PSD" + tag);
      const ThetaDualCertificate back = certificate_from_slack(g, z.matrix);
      c.near(back.t, N / l, 1e-12, "read-off t" + tag);
      bool structure = true;
      for (double lam : back.lambdas) structure = structure && std::abs(lam - 2.0) <= 1e-12;
      for (const auto& [e, mu] : back.mus) {
        const double want = (e.second - e.first == 2 * N) ? 2.0 * f : 2.0 * l;
        structure = structure && std::abs(mu - want) <= 1e-12;
      }
      c.check(structure, "read-off lambda/mu" + tag);
      c.near(verify_dual_certificate(g, z), N / l, 1e-12, "verified bound" + tag);

      std::vector<double> row(4 * N, 0.0);
      row[0] = 1.0;
      row[1] = row[4 * N - 1] = l;
      row[2 * N] = f;
      const std::vector<double> lam = circulant_eigenvalues(row);
      c.near(lam[2 * N], 0.0, 1e-12, "lambda_2N" + tag);
      c.near(lam[2 * N - 1], 0.0, 1e-12, "lambda_2N-1" + tag);
    }
  });
  return c.report();
}

bool criterion4() {
  Criterion c(4, "Mermin graph, optimizer and configurations");
  guarded(c, [&] {
    const WeightedGraph g = shrikhande_complement();
    c.check(independence_number(g).value == 3.0, "alpha = 3 exactly");
    const ThetaResult th = lovasz_theta(g);
    c.near(th.value, 4.0, 1e-6, "theta");
    c.near(fractional_packing(g), 4.0, 1e-9, "alpha*");
    c.check(gram_decompose(mermin_primal_closed_form(), 1e-8).rank == 7, "rank P_Mermin = 7");
    c.check(gram_decompose(th.primal, 1e-6).rank == 7, "rank of solved primal = 7");
    const ScenarioId id = ScenarioId::parse("mermin");
    c.near(evaluate_witness(witness_for(id), reference_realization(id)).value, 4.0, 1e-10, "GHZ witness value");
    c.check(mermin_seven_dim_check() <= 5e-3, "seven-dimensional configuration deviation <= 5e-3");
  });
  return c.report();
}

bool criterion5() {
  Criterion c(5, "AS4 alpha, theta, alpha* and realization");
  guarded(c, [&] {
    const ScenarioId id = ScenarioId::parse("as4");
    const BellWitness w = witness_for(id);
    const WeightedGraph g = exclusivity_graph(w);
    const double theta = 7.0 + 5.0 * std::sqrt(6.0) / 3.0;
    c.check(independence_number(g).value == 10.0, "alpha = 10 exactly");
    c.near(lovasz_theta(g).value, theta, 1e-5, "theta");
    c.near(fractional_packing(g), 14.0, 1e-9, "alpha*");
    c.near(evaluate_witness(w, reference_realization(id)).value, theta, 1e-4, "realization value");
  });
  return c.report();
}

double max_residual(const SelfTestReport& rep) {
  double m = rep.state_residual;
  for (double v : rep.vector_residuals) m = std::max(m, v);
  return m;
}

bool criterion6() {
  Criterion c(6, "self-testing round trips");
  constexpr double tol = 1e-7;
  std::vector<std::string> names = {"chsh", "mermin", "as4"};
  for (int N = 2; N <= 4; ++N) names.push_back("chained:" + std::to_string(N));
  for (const std::string& name : names) {
    guarded(c, [&] {
      const ScenarioId id = ScenarioId::parse(name);
      const SelfTestReference ref = prepare_reference(id);
      const Realization& r = ref.realization;
      const double theta = lovasz_theta(exclusivity_graph(ref.witness)).value;
      auto accept = [&](const Realization& cand, const std::string& what) {
        try {
          const SelfTestReport rep = run_selftest(ref, cand);
          c.check(max_residual(rep) <= tol && verify_selftest_claim(ref, cand, rep, tol), name + " " + what);
        } catch (const std::exception& e) {
          c.check(false, name + " " + what + ": " + e.what());
        }
      };
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::vector<Eigen::MatrixXd> u;
        for (int p = 0; p < r.parties(); ++p) u.push_back(random_orthogonal(r.dims[p], 1000 * seed + p));
        accept(transform_realization(r, u), "rotation seed " + std::to_string(seed));
      }
      for (int extra = 1; extra <= 2; ++extra) {
        std::vector<Eigen::MatrixXd> u;
        for (int p = 0; p < r.parties(); ++p) u.push_back(random_isometry(r.dims[p], extra, 77 * extra + p));
        accept(transform_realization(r, u), "padding +" + std::to_string(extra));
      }
      for (double angle : {0.05, 0.2, 0.6}) {
        for (int p = 0; p < r.parties(); ++p) {
          const Realization cand = perturb_setting(r, p, 1, angle);
          const double value = evaluate_witness(ref.witness, cand).value;
          if (value > theta - 1e-3) continue;
          bool rejected = false;
          try {
            const SelfTestReport rep = run_selftest(ref, cand);
            rejected = !verify_selftest_claim(ref, cand, rep, tol);
          } catch (const NotAnOptimizer&) {
            rejected = true;
          }
          c.check(rejected, name + " perturbed party " + std::to_string(p) + " by " + std::to_string(angle));
        }
      }
    });
  }
  // General-rank pipeline with an explicit ancilla.
  for (const char* name : {"chsh", "mermin"}) {
    guarded(c, [&] {
      const SelfTestReference ref = prepare_reference(ScenarioId::parse(name));
      const int n = ref.realization.parties();
      Eigen::VectorXd junk(1 << n);
      for (int k = 0; k < junk.size(); ++k) junk(k) = std::cos(0.7 * k + 0.3);
      junk.normalize();
      const Realization cand = with_ancilla(ref.realization, std::vector<int>(n, 2), junk);
      const SelfTestReport rep = n == 2 ? extract_bipartite_isometries_general(ref, cand)
                                        : extract_tripartite_isometries_general(ref, cand);
      const double err = std::min((rep.junk - junk).norm(), (rep.junk + junk).norm());
      c.check(err <= tol, std::string(name) + " ancilla junk recovered");
      c.check(verify_selftest_claim(ref, cand, rep, tol), std::string(name) + " ancilla claim verified");
    });
  }
  return c.report();
}

bool criterion7() {
  Criterion c(7, "independence number oracle and sandwich");
  guarded(c, [&] {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<int> nd(1, 12);
    std::uniform_real_distribution<double> pd(0.1, 0.7);
    std::vector<WeightedGraph> corpus;
    for (int t = 0; t < 50; ++t) {
      const WeightedGraph g = bellgraph::testing::random_graph(nd(rng), pd(rng), rng, true);
      c.near(independence_number(g).value, brute_force_alpha(g), 1e-12, "alpha random graph " + std::to_string(t));
      corpus.push_back(g);
    }
    for (const char* name : {"chsh", "chained:3", "chained:5", "mermin", "as4"}) {
      corpus.push_back(exclusivity_graph(witness_for(ScenarioId::parse(name))));
    }
    corpus.push_back(circulant(5, {1}));
    corpus.push_back(empty_graph(4));
    corpus.push_back(complete_graph(6));
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const WeightedGraph& g = corpus[i];
      const double a = independence_number(g).value, th = lovasz_theta(g).value, as = fractional_packing(g);
      c.check(a <= th + 1e-6 && th <= as + 1e-6, "sandwich on corpus graph " + std::to_string(i));
    }
  });
  return c.report();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion8(const std::string& cli) {
  Criterion c(8, "CLI determinism");
  if (cli.empty()) {
    c.check(false, "CLI path not given");
    return c.report();
  }
  guarded(c, [&] {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("bellgraph_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path cand = dir / "cand.json";
    const fs::path graph = dir / "graph.json";
    std::ofstream(graph) << R"({"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[0,4]], "weights": [1,1,1,1,1]})";
    auto run = [&](const std::string& args, const fs::path& out) {
      const std::string cmd = "'" + cli + "' " + args + " >'" + out.string() + "' 2>/dev/null";
      const int status = std::system(cmd.c_str());
      return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    run("scenario --scenario mermin --candidate ancilla --seed 3 --realization-out '" + cand.string() + "'",
        dir / "ignore.txt");
    const std::vector<std::string> cmds = {
        "theta --scenario chsh --json",
        "theta --graph '" + graph.string() + "' --json",
        "certify --scenario chained:5 --json",
        "uniqueness --scenario mermin --json",
        "uniqueness --scenario as4 --json",
        "selftest --scenario mermin --candidate '" + cand.string() + "' --json",
        "selftest --scenario chsh --json",
        "scenario --scenario as4 --candidate rotated --seed 9 --json",
        "export --scenario mermin --format json",
        "export --scenario as4 --format dot",
    };
    for (const std::string& args : cmds) {
      const int a = run(args, dir / "a.txt");
      const int b = run(args, dir / "b.txt");
      const std::string sa = slurp(dir / "a.txt"), sb = slurp(dir / "b.txt");
      c.check(a == b && a >= 0 && !sa.empty() && sa == sb, "byte-identical: " + args);
    }
    fs::remove_all(dir);
  });
  return c.report();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
#ifdef BELLGRAPH_CLI_PATH
  cli = BELLGRAPH_CLI_PATH;
#endif
  if (argc > 1) cli = argv[1];
  const std::vector<std::function<bool()>> all = {criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7,
                                                  [&] { return criterion8(cli); }};
  int failed = 0;
  for (const auto& f : all) failed += f() ? 0 : 1;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed;
}
