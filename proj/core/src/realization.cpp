#include "bellgraph/realization.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "bellgraph/errors.hpp"

namespace bellgraph {

namespace {

constexpr double kProjectorTol = 1e-10;
constexpr double kStateNormTol = 1e-12;

std::string where(int p, int x, int a) {
  return "party " + std::to_string(p) + " setting " + std::to_string(x) + " outcome " +
         std::to_string(a);
}

}  // namespace

int Realization::total_dim() const {
  int d = 1;
  for (int k : dims) d *= k;
  return d;
}

void Realization::validate() const {
  if (dims.empty()) throw InputError("realization: no parties");
  for (int k : dims) {
    if (k < 1) throw InputError("realization: local dimensions must be positive");
  }
  if (state.size() != total_dim()) {
    throw InputError("realization: state has size " + std::to_string(state.size()) +
                     ", expected " + std::to_string(total_dim()));
  }
  if (std::abs(state.norm() - 1.0) > kStateNormTol) {
    throw InputError("realization: state is not normalized");
  }
  if (static_cast<int>(projectors.size()) != parties()) {
    throw InputError("realization: projector list must have one entry per party");
  }
  for (int p = 0; p < parties(); ++p) {
    for (std::size_t x = 0; x < projectors[p].size(); ++x) {
      const auto& outs = projectors[p][x];
      for (std::size_t a = 0; a < outs.size(); ++a) {
        const Eigen::MatrixXd& P = outs[a];
        if (P.rows() != dims[p] || P.cols() != dims[p]) {
          throw InputError("realization: projector shape mismatch at " + where(p, x, a));
        }
        if ((P - P.transpose()).cwiseAbs().maxCoeff() > kProjectorTol ||
            (P * P - P).cwiseAbs().maxCoeff() > kProjectorTol) {
          throw InputError("realization: not an orthogonal projector at " + where(p, x, a));
        }
        for (std::size_t b = 0; b < a; ++b) {
          if ((P * outs[b]).cwiseAbs().maxCoeff() > kProjectorTol) {
            throw InputError("realization: outcomes " + std::to_string(b) + " and " +
                             std::to_string(a) + " of party " + std::to_string(p) +
                             " setting " + std::to_string(x) + " are not orthogonal");
          }
        }
      }
    }
  }
  if (vectors.empty()) return;
  if (vectors.size() != projectors.size()) throw InputError("realization: vector list shape");
  for (int p = 0; p < parties(); ++p) {
    if (vectors[p].size() != projectors[p].size()) throw InputError("realization: vector list shape");
    for (std::size_t x = 0; x < vectors[p].size(); ++x) {
      if (vectors[p][x].size() != projectors[p][x].size()) {
        throw InputError("realization: vector list shape");
      }
      for (std::size_t a = 0; a < vectors[p][x].size(); ++a) {
        const Eigen::VectorXd& v = vectors[p][x][a];
        if (v.size() != dims[p] || std::abs(v.norm() - 1.0) > kProjectorTol ||
            (v * v.transpose() - projectors[p][x][a]).cwiseAbs().maxCoeff() > kProjectorTol) {
          throw InputError("realization: defining vector inconsistent at " + where(p, x, a));
        }
      }
    }
  }
}

void Realization::check_compatible(const BellScenario& s) const {
  if (s.parties != parties()) {
    throw InputError("realization has " + std::to_string(parties()) +
                     " parties, scenario needs " + std::to_string(s.parties));
  }
  for (int p = 0; p < parties(); ++p) {
    if (static_cast<int>(projectors[p].size()) < s.settings[p]) {
      throw InputError("realization: party " + std::to_string(p) + " lacks settings");
    }
    for (int x = 0; x < s.settings[p]; ++x) {
      if (static_cast<int>(projectors[p][x].size()) < s.outcomes[p]) {
        throw InputError("realization: party " + std::to_string(p) + " setting " +
                         std::to_string(x) + " lacks outcomes");
      }
    }
  }
}

Realization rank_one_realization(std::vector<int> dims, Eigen::VectorXd state,
                                 std::vector<std::vector<std::vector<Eigen::VectorXd>>> vectors) {
  Realization r;
  r.dims = std::move(dims);
  r.state = std::move(state);
  r.projectors.resize(vectors.size());
  for (std::size_t p = 0; p < vectors.size(); ++p) {
    r.projectors[p].resize(vectors[p].size());
    for (std::size_t x = 0; x < vectors[p].size(); ++x) {
      for (const Eigen::VectorXd& v : vectors[p][x]) {
        r.projectors[p][x].push_back(v * v.transpose());
      }
    }
  }
  r.vectors = std::move(vectors);
  r.validate();
  return r;
}

Eigen::VectorXd ket_m(double angle) {
  Eigen::VectorXd v(2);
  v << std::cos(angle), std::sin(angle);
  return v;
}

std::vector<double> as4_angles() {
  const double pi = std::numbers::pi;
  const double r145 = std::sqrt(145.0);
  return {0.0, std::asin(1.0 / std::sqrt(6.0)),
          0.5 * (pi - std::atan(std::sqrt(5.0 * r145 / 8.0 + 77.0 / 8.0))),
          0.5 * (pi - std::atan(48.0 * std::sqrt(2.0 / (275.0 * r145 + 3317.0))))};
}

double as4_state_angle() {
  const std::vector<double> al = as4_angles();
  return (std::numbers::pi / 2.0 - al[1] - 2.0 * al[3]) / 2.0;
}

namespace {

using Kets = std::vector<std::vector<Eigen::VectorXd>>;

Kets binary_kets(const std::vector<double>& angles) {
  Kets k;
  for (double a : angles) k.push_back({ket_m(a), ket_m(a + std::numbers::pi / 2.0)});
  return k;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Realization chsh_reference() {
  const double a = 1.0 / std::numbers::sqrt2;
  const double c = std::cos(std::numbers::pi / 8.0);
  const double d = std::sin(std::numbers::pi / 8.0);
  // Kets indexed [setting][outcome].
  Kets A = {{vec({1, 0}), vec({0, -1})}, {vec({a, a}), vec({a, -a})}};
  Kets B = {{vec({c, d}), vec({d, -c})}, {vec({c, -d}), vec({-d, -c})}};
  return rank_one_realization({2, 2}, vec({a, 0, 0, a}), {A, B});
}

Realization chained_reference(int N) {
  const double pi = std::numbers::pi;
  // Observable of label k sits at angle (k - 1) pi / (2N); the kets use half angles.
  std::vector<double> alice, bob;
  for (int s = 0; s < N; ++s) {
    alice.push_back(0.5 * (2 * s) * pi / (2.0 * N));
    bob.push_back(0.5 * (2 * s + 1) * pi / (2.0 * N));
  }
  const double h = 1.0 / std::numbers::sqrt2;
  return rank_one_realization({2, 2}, vec({h, 0, 0, h}), {binary_kets(alice), binary_kets(bob)});
}

Realization mermin_reference() {
  const double h = 1.0 / std::numbers::sqrt2;
  // Setting 0 is {Z, O}, setting 1 is {P, M}.
  Kets k = {{vec({1, 0}), vec({0, 1})}, {vec({h, h}), vec({h, -h})}};
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(8);
  psi(1) = psi(2) = psi(4) = 0.5;
  psi(7) = -0.5;
  return rank_one_realization({2, 2, 2}, psi, {k, k, k});
}

Realization as4_reference() {
  const double t = as4_state_angle();
  const double ct = std::cos(t) / std::numbers::sqrt2;
  const double st = std::sin(t) / std::numbers::sqrt2;
  Kets k = binary_kets(as4_angles());
  return rank_one_realization({2, 2}, vec({ct, -st, -st, -ct}), {k, k});
}

}  // namespace

Realization reference_realization(const ScenarioId& id) {
  switch (id.kind) {
    case ScenarioKind::Chsh: return chsh_reference();
    case ScenarioKind::Chained:
      if (id.n < 2) throw InputError("reference_realization: chained N must be at least 2");
      return chained_reference(id.n);
    case ScenarioKind::Mermin: return mermin_reference();
    case ScenarioKind::As4: return as4_reference();
  }
  throw InputError("reference_realization: unknown scenario");
}

Eigen::VectorXd apply_local(const std::vector<int>& dims, const std::vector<Eigen::MatrixXd>& ops,
                            const Eigen::VectorXd& v) {
  if (ops.size() != dims.size()) throw InputError("apply_local: one operator per party required");
  std::vector<int> cur = dims;
  Eigen::VectorXd out = v;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    if (ops[p].cols() != dims[p]) throw InputError("apply_local: operator width mismatch");
    long left = 1, right = 1;
    for (std::size_t q = 0; q < p; ++q) left *= cur[q];
    for (std::size_t q = p + 1; q < cur.size(); ++q) right *= cur[q];
    const int din = cur[p];
    const int dout = static_cast<int>(ops[p].rows());
    if (out.size() != left * din * right) throw InputError("apply_local: vector size mismatch");
    Eigen::VectorXd next = Eigen::VectorXd::Zero(left * dout * right);
    for (long l = 0; l < left; ++l) {
      // Block of shape (din, right), row-major in the flat index.
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> in(
          out.data() + l * din * right, din, right);
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dst(
          next.data() + l * dout * right, dout, right);
      dst = ops[p] * in;
    }
    cur[p] = dout;
    out = std::move(next);
  }
  return out;
}

Eigen::VectorXd apply_event(const Realization& r, const Event& e) {
  if (static_cast<int>(e.a.size()) != r.parties()) throw InputError("apply_event: arity mismatch");
  std::vector<Eigen::MatrixXd> ops;
  for (int p = 0; p < r.parties(); ++p) ops.push_back(r.projectors[p][e.x[p]][e.a[p]]);
  return apply_local(r.dims, ops, r.state);
}

WitnessEvaluation evaluate_witness(const BellWitness& wit, const Realization& r) {
  r.validate();
  r.check_compatible(wit.scenario);
  WitnessEvaluation ev;
  for (const WitnessTerm& t : wit.terms) {
    const double p = apply_event(r, t.event).squaredNorm();
    ev.probabilities.push_back(p);
    ev.value += t.weight * p;
  }
  ev.operator_value = wit.affine_scale * ev.value + wit.affine_offset;
  const WeightedGraph g = exclusivity_graph(wit);
  for (auto [i, j] : g.edges()) {
    // tr(Pi_i Pi_j) factorizes over parties.
    double tr = 1.0;
    for (int p = 0; p < r.parties(); ++p) {
      const auto& ei = wit.terms[i].event;
      const auto& ej = wit.terms[j].event;
      tr *= (r.projectors[p][ei.x[p]][ei.a[p]] * r.projectors[p][ej.x[p]][ej.a[p]]).trace();
    }
    if (std::abs(tr) > kProjectorTol) ev.violations.emplace_back(i, j);
  }
  return ev;
}

SymMatrix behavior_gram(const BellWitness& wit, const Realization& r) {
  r.validate();
  r.check_compatible(wit.scenario);
  const int n = static_cast<int>(wit.terms.size());
  Eigen::MatrixXd V(r.total_dim(), n + 1);
  V.col(0) = r.state;
  for (int i = 0; i < n; ++i) V.col(i + 1) = apply_event(r, wit.terms[i].event);
  Eigen::MatrixXd G = V.transpose() * V;
  return SymMatrix(0.5 * (G + G.transpose()));
}

Eigen::VectorXd interleave_ancilla(const Eigen::VectorXd& psi, const std::vector<int>& dims,
                                   const Eigen::VectorXd& junk, const std::vector<int>& kdims) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(kdims.size()) != n) throw InputError("interleave_ancilla: party count mismatch");
  long hd = 1, kd = 1;
  for (int p = 0; p < n; ++p) {
    hd *= dims[p];
    kd *= kdims[p];
  }
  if (psi.size() != hd || junk.size() != kd) throw InputError("interleave_ancilla: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(hd * kd);
  std::vector<int> hi(n), ki(n);
  for (long h = 0; h < hd; ++h) {
    long rem = h;
    for (int p = n - 1; p >= 0; --p) {
      hi[p] = static_cast<int>(rem % dims[p]);
      rem /= dims[p];
    }
    for (long k = 0; k < kd; ++k) {
      rem = k;
      for (int p = n - 1; p >= 0; --p) {
        ki[p] = static_cast<int>(rem % kdims[p]);
        rem /= kdims[p];
      }
      long idx = 0;
      for (int p = 0; p < n; ++p) idx = idx * (dims[p] * kdims[p]) + hi[p] * kdims[p] + ki[p];
      out(idx) = psi(h) * junk(k);
    }
  }
  return out;
}

Realization with_ancilla(const Realization& r, const std::vector<int>& ancilla_dims,
                         const Eigen::VectorXd& junk,
                         const std::vector<std::vector<Eigen::MatrixXd>>& rotations) {
  r.validate();
  const int n = r.parties();
  if (static_cast<int>(ancilla_dims.size()) != n) {
    throw InputError("with_ancilla: one ancilla dimension per party required");
  }
  long kd = 1;
  for (int k : ancilla_dims) {
    if (k < 1) throw InputError("with_ancilla: ancilla dimensions must be positive");
    kd *= k;
  }
  if (junk.size() != kd || std::abs(junk.norm() - 1.0) > kStateNormTol) {
    throw InputError("with_ancilla: junk must be a unit vector on the ancilla space");
  }
  if (!rotations.empty() && static_cast<int>(rotations.size()) != n) {
    throw InputError("with_ancilla: rotations must list one entry per party");
  }

  // Local controlled rotations V_p = sum_j U_{p,j} (x) |j><j|.
  std::vector<Eigen::MatrixXd> V(n);
  std::vector<int> dims(n);
  for (int p = 0; p < n; ++p) {
    const int d = r.dims[p];
    const int k = ancilla_dims[p];
    dims[p] = d * k;
    V[p] = Eigen::MatrixXd::Zero(d * k, d * k);
    for (int j = 0; j < k; ++j) {
      Eigen::MatrixXd U = Eigen::MatrixXd::Identity(d, d);
      if (!rotations.empty() && !rotations[p].empty()) {
        if (static_cast<int>(rotations[p].size()) != k) {
          throw InputError("with_ancilla: party " + std::to_string(p) +
                           " needs one rotation per ancilla level");
        }
        U = rotations[p][j];
        if (U.rows() != d || U.cols() != d ||
            (U.transpose() * U - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
          throw InputError("with_ancilla: rotations must be orthogonal of the local dimension");
        }
      }
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(k, k);
      E(j, j) = 1.0;
      V[p] += kron(U, E);
    }
  }

  const Eigen::VectorXd joint = interleave_ancilla(r.state, r.dims, junk, ancilla_dims);

  Realization out;
  out.dims = dims;
  out.state = apply_local(dims, V, joint);
  out.state /= out.state.norm();
  out.projectors.resize(n);
  bool rank_one = r.rank_one();
  for (int p = 0; p < n; ++p) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(ancilla_dims[p], ancilla_dims[p]);
    if (ancilla_dims[p] > 1) rank_one = false;
    for (const auto& outs : r.projectors[p]) {
      std::vector<Eigen::MatrixXd> ps;
      for (const Eigen::MatrixXd& P : outs) {
        Eigen::MatrixXd Q = V[p] * kron(P, I) * V[p].transpose();
        ps.push_back(0.5 * (Q + Q.transpose()));
      }
      out.projectors[p].push_back(std::move(ps));
    }
  }
  if (rank_one) {
    out.vectors = r.vectors;
    for (int p = 0; p < n; ++p) {
      for (auto& outs : out.vectors[p]) {
        for (Eigen::VectorXd& v : outs) v = V[p] * v;
      }
    }
  }
  out.validate();
  return out;
}

Realization transform_realization(const Realization& r,
                                  const std::vector<Eigen::MatrixXd>& isometries) {
  r.validate();
  const int n = r.parties();
  if (static_cast<int>(isometries.size()) != n) {
    throw InputError("transform_realization: one isometry per party required");
  }
  Realization out;
  for (int p = 0; p < n; ++p) {
    const Eigen::MatrixXd& U = isometries[p];
    if (U.cols() != r.dims[p] || U.rows() < U.cols() ||
        (U.transpose() * U - Eigen::MatrixXd::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff() >
            1e-10) {
      throw InputError("transform_realization: party " + std::to_string(p) +
                       " map is not an isometry from its local space");
    }
    out.dims.push_back(static_cast<int>(U.rows()));
  }
  out.state = apply_local(r.dims, isometries, r.state);
  out.state /= out.state.norm();
  out.projectors.resize(n);
  for (int p = 0; p < n; ++p) {
    for (const auto& outs : r.projectors[p]) {
      std::vector<Eigen::MatrixXd> ps;
      for (const Eigen::MatrixXd& P : outs) {
        Eigen::MatrixXd Q = isometries[p] * P * isometries[p].transpose();
        ps.push_back(0.5 * (Q + Q.transpose()));
      }
      out.projectors[p].push_back(std::move(ps));
    }
  }
  if (r.rank_one()) {
    out.vectors = r.vectors;
    for (int p = 0; p < n; ++p) {
      for (auto& outs : out.vectors[p]) {
        for (Eigen::VectorXd& v : outs) v = isometries[p] * v;
      }
    }
  }
  out.validate();
  return out;
}

Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed) {
  if (dim < 1) throw InputError("random_orthogonal: dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) G(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

Eigen::MatrixXd random_isometry(int dim, int extra, std::uint64_t seed) {
  if (extra < 0) throw InputError("random_isometry: extra dimension must be nonnegative");
  return random_orthogonal(dim + extra, seed).leftCols(dim);
}

Realization perturb_setting(const Realization& r, int party, int setting, double angle) {
  r.validate();
  if (party < 0 || party >= r.parties() || setting < 0 ||
      setting >= static_cast<int>(r.projectors[party].size()) || r.dims[party] < 2) {
    throw InputError("perturb_setting: party/setting out of range");
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(r.dims[party], r.dims[party]);
  G(0, 0) = G(1, 1) = std::cos(angle);
  G(1, 0) = std::sin(angle);
  G(0, 1) = -std::sin(angle);
  Realization out = r;
  for (Eigen::MatrixXd& P : out.projectors[party][setting]) P = G * P * G.transpose();
  if (out.rank_one()) {
    for (Eigen::VectorXd& v : out.vectors[party][setting]) v = G * v;
  }
  out.validate();
  return out;
}

}  // namespace bellgraph
