#include "bellgraph/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "bellgraph/errors.hpp"

namespace bellgraph {

void SdpProblem::validate() const {
  if (constraints.empty()) throw InputError("sdp: constraint list is empty");
  if (dim() == 0) throw InputError("sdp: zero-dimensional problem");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i].a.dim() != dim()) {
      throw InputError("sdp: constraint " + std::to_string(i) + " has dimension " +
                       std::to_string(constraints[i].a.dim()) + ", expected " +
                       std::to_string(dim()));
    }
  }
}

namespace {

struct Entry {
  int r;
  int c;
  double v;
};

// Nonzeros of a constraint matrix, both triangles.
using SparseSym = std::vector<Entry>;

SparseSym sparsify(const SymMatrix& a) {
  SparseSym out;
  for (int r = 0; r < a.dim(); ++r) {
    for (int c = 0; c < a.dim(); ++c) {
      if (a(r, c) != 0.0) out.push_back({r, c, a(r, c)});
    }
  }
  return out;
}

class Solver {
 public:
  Solver(const SdpProblem& p, const SdpOptions& o) : p_(p), o_(o), d_(p.dim()) {
    m_ = static_cast<int>(p.constraints.size());
    a_.reserve(m_);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      a_.push_back(sparsify(p.constraints[i].a));
      b_(i) = p.constraints[i].b;
    }
    c_ = p.objective.dense();
  }

  SdpSolution run() {
    initialize();
    double pres = 0.0, dres = 0.0, pobj = 0.0, dobj = 0.0;
    for (int it = 0; it <= o_.max_iterations; ++it) {
      Eigen::VectorXd rp = b_ - apply_a(X_);
      Eigen::MatrixXd rd = c_ - apply_at(y_) + Z_;
      pobj = c_.cwiseProduct(X_).sum();
      dobj = b_.dot(y_);
      pres = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
      dres = rd.cwiseAbs().maxCoeff();
      double mu = X_.cwiseProduct(Z_).sum() / d_;
      if (o_.on_iterate) o_.on_iterate({it, pobj, dobj, pres, dres, mu});
      if (pres <= o_.tol && dres <= o_.tol && std::abs(pobj - dobj) <= o_.tol) {
        return finish(it, pobj, dobj, pres, dres);
      }
      if (it == o_.max_iterations) break;
      if (!step(rp, rd, mu)) {
        throw SolverError("sdp: step length collapsed before reaching tolerance", it, pres, dres,
                          std::abs(pobj - dobj));
      }
    }
    throw SolverError("sdp: iteration cap reached", o_.max_iterations, pres, dres,
                      std::abs(pobj - dobj));
  }

 private:
  void initialize() {
    if (o_.start) {
      const SdpStart& s = *o_.start;
      if (s.x.dim() != d_ || s.z.dim() != d_ || s.y.size() != m_) {
        throw InputError("sdp: starting point has wrong dimensions");
      }
      X_ = s.x.dense();
      Z_ = s.z.dense();
      y_ = s.y;
    } else {
      double xs = 10.0, zs = 10.0;
      for (int i = 0; i < m_; ++i) {
        double na = p_.constraints[i].a.dense().norm();
        xs = std::max(xs, std::sqrt(static_cast<double>(d_)) * (1.0 + std::abs(b_(i))) / (1.0 + na));
      }
      zs = std::max(zs, (1.0 + c_.norm()) / std::sqrt(static_cast<double>(d_)));
      X_ = xs * Eigen::MatrixXd::Identity(d_, d_);
      Z_ = zs * Eigen::MatrixXd::Identity(d_, d_);
      y_ = Eigen::VectorXd::Zero(m_);
    }
    if (Eigen::LLT<Eigen::MatrixXd>(X_).info() != Eigen::Success ||
        Eigen::LLT<Eigen::MatrixXd>(Z_).info() != Eigen::Success) {
      throw InputError("sdp: starting X and Z must be positive definite");
    }
  }

  // A(W)_i = sum_pq (A_i)_pq W_pq; W need not be symmetric.
  Eigen::VectorXd apply_a(const Eigen::MatrixXd& W) const {
    Eigen::VectorXd out(m_);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (const Entry& e : a_[i]) s += e.v * W(e.r, e.c);
      out(i) = s;
    }
    return out;
  }

  Eigen::MatrixXd apply_at(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_);
    for (int i = 0; i < m_; ++i) {
      for (const Entry& e : a_[i]) out(e.r, e.c) += y(i) * e.v;
    }
    return out;
  }

  // Nesterov-Todd scaling: with X = Lx Lx^T, Z = Lz Lz^T and Lz^T Lx = U S V^T,
  // G = Lx V S^-1/2 maps both X and Z to the diagonal S (G^-1 X G^-T = G^T Z G = S).
  struct Scaling {
    Eigen::MatrixXd g;
    Eigen::VectorXd s;
    Eigen::MatrixXd at;  // column i is vec(G^T A_i G)
    Eigen::MatrixXd r;   // at^T at = R^T R
  };

  std::optional<Scaling> scaling() const {
    Eigen::LLT<Eigen::MatrixXd> xllt(X_), zllt(Z_);
    if (xllt.info() != Eigen::Success || zllt.info() != Eigen::Success) return std::nullopt;
    const Eigen::MatrixXd lx = xllt.matrixL(), lz = zllt.matrixL();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lz.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Scaling sc;
    sc.s = svd.singularValues();
    if (!(sc.s.minCoeff() > 0.0)) return std::nullopt;
    sc.g = lx * svd.matrixV() * sc.s.cwiseSqrt().cwiseInverse().asDiagonal();
    sc.at.resize(static_cast<Eigen::Index>(d_) * d_, m_);
    for (int i = 0; i < m_; ++i) {
      Eigen::MatrixXd ag = Eigen::MatrixXd::Zero(d_, d_);
      for (const Entry& e : a_[i]) ag.row(e.r) += e.v * sc.g.row(e.c);
      Eigen::MatrixXd ai = sc.g.transpose() * ag;
      sc.at.col(i) = Eigen::Map<const Eigen::VectorXd>(ai.data(), ai.size());
    }
    // QR of the stacked scaled constraints gives the Schur factor without squaring
    // its condition number.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sc.at);
    sc.r = qr.matrixQR().topRows(m_).triangularView<Eigen::Upper>();
    for (int i = 0; i < m_; ++i) {
      if (!(std::abs(sc.r(i, i)) > 0.0)) return std::nullopt;
    }
    return sc;
  }

  Eigen::VectorXd scaled_a(const Scaling& sc, const Eigen::MatrixXd& w) const {
    return sc.at.transpose() * Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
  }

  Eigen::MatrixXd scaled_at(const Scaling& sc, const Eigen::VectorXd& y) const {
    Eigen::VectorXd v = sc.at * y;
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), d_, d_);
  }

  // M y = rhs with M = at^T at, plus one refinement step.
  Eigen::VectorXd schur_solve(const Scaling& sc, const Eigen::VectorXd& rhs) const {
    auto inv = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd w = sc.r.transpose().triangularView<Eigen::Lower>().solve(v);
      return Eigen::VectorXd(sc.r.triangularView<Eigen::Upper>().solve(w));
    };
    Eigen::VectorXd y = inv(rhs);
    return y + inv(rhs - sc.at.transpose() * (sc.at * y));
  }

  // Largest alpha with S + alpha dS >= 0 (infinity if unrestricted).
  static double max_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& dS) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd t = L.triangularView<Eigen::Lower>().solve(dS);
    Eigen::MatrixXd w = L.triangularView<Eigen::Lower>().solve(t.transpose());
    w = 0.5 * (w + w.transpose());
    double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(w, Eigen::EigenvaluesOnly)
                      .eigenvalues()(0);
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
  }

  // Same for a positive diagonal S.
  static double max_step_diag(const Eigen::VectorXd& s, const Eigen::MatrixXd& dS) {
    Eigen::VectorXd r = s.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd w = r.asDiagonal() * dS * r.asDiagonal();
    w = 0.5 * (w + w.transpose());
    double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(w, Eigen::EigenvaluesOnly)
                      .eigenvalues()(0);
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
  }

  struct Direction {
    Eigen::MatrixXd dx;  // scaled
    Eigen::VectorXd dy;
    Eigen::MatrixXd dz;  // scaled
  };

  // Scaled system: A~(dX~) = rp, A~^T(dy) - dZ~ = rd~, and
  // (S (dX~ + dZ~) + (dX~ + dZ~) S) / 2 = rc, solved entrywise since S is diagonal.
  Direction direction(const Scaling& sc, const Eigen::VectorXd& rp, const Eigen::MatrixXd& rd_s,
                      const Eigen::MatrixXd& rc) const {
    Eigen::MatrixXd t(d_, d_);
    for (int k = 0; k < d_; ++k) {
      for (int l = 0; l < d_; ++l) t(k, l) = 2.0 * rc(k, l) / (sc.s(k) + sc.s(l));
    }
    Direction dir;
    dir.dy = schur_solve(sc, scaled_a(sc, t + rd_s) - rp);
    dir.dz = scaled_at(sc, dir.dy) - rd_s;
    dir.dz = 0.5 * (dir.dz + dir.dz.transpose());
    dir.dx = t - dir.dz;
    dir.dx = 0.5 * (dir.dx + dir.dx.transpose());
    return dir;
  }

  bool step(const Eigen::VectorXd& rp, const Eigen::MatrixXd& rd, double mu) {
    std::optional<Scaling> scaled = scaling();
    if (!scaled) return false;
    const Scaling& sc = *scaled;
    const Eigen::MatrixXd rd_s = sc.g.transpose() * rd * sc.g;
    const Eigen::MatrixXd s2 = sc.s.cwiseAbs2().asDiagonal();

    Direction pred = direction(sc, rp, rd_s, -s2);
    double ap = std::min(1.0, o_.step_fraction * max_step_diag(sc.s, pred.dx));
    double ad = std::min(1.0, o_.step_fraction * max_step_diag(sc.s, pred.dz));
    Eigen::MatrixXd xs = sc.s.asDiagonal(), zs = xs;
    xs += ap * pred.dx;
    zs += ad * pred.dz;
    double mu_aff = xs.cwiseProduct(zs).sum() / d_;
    double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    Eigen::MatrixXd cross = pred.dx * pred.dz;
    Eigen::MatrixXd rc = sigma * mu * Eigen::MatrixXd::Identity(d_, d_) - s2 -
                         0.5 * (cross + cross.transpose());
    Direction corr = direction(sc, rp, rd_s, rc);

    // Back to the original coordinates. dZ is rebuilt from dy so the dual
    // residual stays exact; dX is pulled back onto A(dX) = rp in the scaled metric,
    // which leaves the near-null directions of X alone.
    Eigen::MatrixXd dx = sc.g * corr.dx * sc.g.transpose();
    dx = 0.5 * (dx + dx.transpose());
    Eigen::VectorXd miss = rp - apply_a(dx);
    for (int pass = 0; pass < 4 && miss.cwiseAbs().maxCoeff() > 0.0; ++pass) {
      Eigen::MatrixXd fix = sc.g * scaled_at(sc, schur_solve(sc, miss)) * sc.g.transpose();
      fix = 0.5 * (fix + fix.transpose());
      const Eigen::VectorXd next = rp - apply_a(dx + fix);
      if (!(next.cwiseAbs().maxCoeff() < miss.cwiseAbs().maxCoeff())) break;
      dx += fix;
      miss = next;
    }
    Eigen::MatrixXd dz = apply_at(corr.dy) - rd;
    dz = 0.5 * (dz + dz.transpose());

    ap = std::min(1.0, o_.step_fraction * max_step(X_, dx));
    ad = std::min(1.0, o_.step_fraction * max_step(Z_, dz));
    if (!(ap > 1e-12) || !(ad > 1e-12)) return false;

    X_ += ap * dx;
    y_ += ad * corr.dy;
    Z_ += ad * dz;
    X_ = 0.5 * (X_ + X_.transpose());
    Z_ = 0.5 * (Z_ + Z_.transpose());
    return true;
  }

  SdpSolution finish(int it, double pobj, double dobj, double pres, double dres) const {
    SdpSolution s;
    s.primal = SymMatrix(X_, 1e-9);
    s.dual_slack = SymMatrix(Z_, 1e-9);
    s.dual_multipliers = y_;
    s.value = pobj;
    s.dual_value = dobj;
    s.gap = std::abs(pobj - dobj);
    s.primal_residual = pres;
    s.dual_residual = dres;
    s.iterations = it;
    return s;
  }

  const SdpProblem& p_;
  const SdpOptions& o_;
  int d_;
  int m_ = 0;
  std::vector<SparseSym> a_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd c_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd Z_;
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& options) {
  p.validate();
  if (!(options.tol > 0.0)) throw InputError("sdp: tolerance must be positive");
  Solver solver(p, options);
  return solver.run();
}

SdpSolution solve_sdp(const SdpProblem& p, double tol) {
  SdpOptions o;
  o.tol = tol;
  return solve_sdp(p, o);
}

}  // namespace bellgraph
