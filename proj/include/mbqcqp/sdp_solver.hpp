#pragma once

// Dense primal-dual path-following interior point method for SdpProblem<double>.
//
// The problem is first put into equality conic form
//
//   min <C, X> + c^T x   s.t.  A(X) + a x = b,   X PSD blocks, x >= 0,
//
// where x collects the shifted scalars (s - lo), one surplus per >= row and
// one slack per finite upper bound. Each iteration uses Nesterov-Todd
// scaling W (W Z W = X) with a Mehrotra predictor-corrector step, and the
// Schur complement M_ij = <A_i, W A_j W> is factored densely.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mbqcqp/sdp_problem.hpp"

namespace mbqcqp {

struct SolverOptions {
  double gap_tol = 1e-7;
  double feas_tol = 1e-8;
  int max_iter = 200;
};

namespace detail {

struct ConicRow {
  std::vector<std::pair<int, Eigen::MatrixXd>> blocks;
  std::vector<std::pair<int, double>> lp;
  double rhs = 0.0;
};

struct ConicForm {
  std::vector<int> dims;
  int lp_dim = 0;
  std::vector<Eigen::MatrixXd> C;
  Eigen::VectorXd c;
  std::vector<ConicRow> rows;
  double objective_offset = 0.0;
  int num_scalars = 0;
  Eigen::VectorXd lo;              // lower bound, or the fixed value
  std::vector<bool> fixed;
  Eigen::VectorXd fixed_value;
  std::vector<bool> row_dropped;
  std::vector<int> scalar_column;  // LP column of a free scalar, -1 if fixed
  std::vector<int> row_origin;     // position of each conic row in SdpSolution::y
  int y_size = 0;
};

// Forcing rows: a row with only scalar terms whose largest attainable
// activity equals its right-hand side pins every scalar in it to the bound
// attaining that activity. Such rows leave the primal without an interior,
// so they are removed and their scalars substituted as constants.
inline std::vector<bool> presolve_fixed(const SdpProblem<double>& p, Eigen::VectorXd& fixed_value,
                                        std::vector<bool>& row_dropped) {
  const int k = p.num_scalars();
  std::vector<bool> fixed(static_cast<std::size_t>(k), false);
  fixed_value = Eigen::VectorXd::Zero(k);
  row_dropped.assign(p.constraints.size(), false);
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    if (!c.blocks.empty() || c.scalars.empty()) continue;
    double max_activity = 0.0;
    for (const auto& t : c.scalars) {
      const auto& bd = p.scalar_bounds[static_cast<std::size_t>(t.index)];
      max_activity += t.coeff * (t.coeff >= 0.0 ? bd.hi : bd.lo);
    }
    if (!std::isfinite(max_activity) || max_activity > c.rhs + 1e-12 * (1.0 + std::abs(c.rhs))) continue;
    row_dropped[j] = true;
    for (const auto& t : c.scalars) {
      const auto& bd = p.scalar_bounds[static_cast<std::size_t>(t.index)];
      fixed[static_cast<std::size_t>(t.index)] = true;
      fixed_value(t.index) = t.coeff >= 0.0 ? bd.hi : bd.lo;
    }
  }
  for (int i = 0; i < k; ++i) {
    const auto& bd = p.scalar_bounds[static_cast<std::size_t>(i)];
    if (bd.lo == bd.hi) {
      fixed[static_cast<std::size_t>(i)] = true;
      fixed_value(i) = bd.lo;
    }
  }
  return fixed;
}

inline ConicForm to_conic(const SdpProblem<double>& p) {
  ConicForm f;
  f.dims = p.block_dims;
  f.C = p.objective_blocks;
  f.num_scalars = p.num_scalars();
  f.fixed = presolve_fixed(p, f.fixed_value, f.row_dropped);

  // Free scalars keep their own LP column (s - lo); fixed ones become constants.
  f.scalar_column.assign(static_cast<std::size_t>(f.num_scalars), -1);
  f.lo = Eigen::VectorXd::Zero(f.num_scalars);
  int col = 0;
  for (int k = 0; k < f.num_scalars; ++k) {
    const auto& bd = p.scalar_bounds[static_cast<std::size_t>(k)];
    if (f.fixed[static_cast<std::size_t>(k)]) {
      f.lo(k) = f.fixed_value(k);
    } else {
      f.lo(k) = bd.lo;
      f.scalar_column[static_cast<std::size_t>(k)] = col++;
    }
  }
  const int n_free = col;
  int m_ineq = 0;
  for (bool d : f.row_dropped)
    if (!d) ++m_ineq;
  int n_upper = 0;
  for (int k = 0; k < f.num_scalars; ++k)
    if (f.scalar_column[static_cast<std::size_t>(k)] >= 0 &&
        std::isfinite(p.scalar_bounds[static_cast<std::size_t>(k)].hi))
      ++n_upper;
  f.lp_dim = n_free + m_ineq + n_upper;
  f.c = Eigen::VectorXd::Zero(f.lp_dim);
  for (int k = 0; k < f.num_scalars; ++k)
    if (const int c = f.scalar_column[static_cast<std::size_t>(k)]; c >= 0) f.c(c) = p.objective_scalars(k);
  f.objective_offset = p.objective_scalars.dot(f.lo);

  int surplus = n_free;
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    if (f.row_dropped[j]) continue;
    const auto& con = p.constraints[j];
    ConicRow row;
    row.rhs = con.rhs;
    for (const auto& t : con.blocks) row.blocks.emplace_back(t.block, t.coeff);
    for (const auto& t : con.scalars) {
      if (const int c = f.scalar_column[static_cast<std::size_t>(t.index)]; c >= 0) row.lp.emplace_back(c, t.coeff);
      row.rhs -= t.coeff * f.lo(t.index);
    }
    row.lp.emplace_back(surplus++, -1.0);
    f.rows.push_back(std::move(row));
    f.row_origin.push_back(static_cast<int>(j));
  }
  int slack = surplus;
  f.y_size = static_cast<int>(p.constraints.size());
  for (int k = 0; k < f.num_scalars; ++k) {
    const int c = f.scalar_column[static_cast<std::size_t>(k)];
    const auto& bd = p.scalar_bounds[static_cast<std::size_t>(k)];
    if (!std::isfinite(bd.hi)) continue;
    const int origin = f.y_size++;
    if (c < 0) continue;
    f.row_origin.push_back(origin);
    ConicRow row;
    row.rhs = bd.hi - bd.lo;
    row.lp = {{c, 1.0}, {slack++, 1.0}};
    f.rows.push_back(std::move(row));
  }
  return f;
}

/// Scalar values from the LP part of an iterate.
inline Eigen::VectorXd recover_scalars(const ConicForm& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd s = f.lo;
  for (int k = 0; k < f.num_scalars; ++k)
    if (const int c = f.scalar_column[static_cast<std::size_t>(k)]; c >= 0) s(k) += x(c);
  return s;
}

inline double frob_inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return A.cwiseProduct(B).sum();
}

/// Largest step a with X + a dX PSD (infinity when dX keeps X PSD).
inline double max_psd_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dX, bool& ok) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) {
    ok = false;
    return 0.0;
  }
  const Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(X.rows(), X.cols()));
  Eigen::MatrixXd S = Linv * dX * Linv.transpose();
  S = 0.5 * (S + S.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_lp_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (dx(k) < 0.0) a = std::min(a, -x(k) / dx(k));
  return a;
}

struct Iterate {
  std::vector<Eigen::MatrixXd> X, Z;
  Eigen::VectorXd x, z, y;
};

struct Direction {
  std::vector<Eigen::MatrixXd> dX, dZ;
  Eigen::VectorXd dx, dz, dy;
};

// Per-block Nesterov-Todd scaling data: W = G G^T, G^T Z G = G^{-1} X G^{-T} = diag(v).
struct NtBlock {
  Eigen::MatrixXd W, G, Ginv;
  Eigen::VectorXd v;
};

class InteriorPoint {
 public:
  InteriorPoint(const ConicForm& f, const SolverOptions& opt) : f_(f), opt_(opt) {
    m_ = static_cast<int>(f_.rows.size());
    nu_ = f_.lp_dim;
    for (int n : f_.dims) nu_ += n;
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_(i) = f_.rows[static_cast<std::size_t>(i)].rhs;
    rows_in_block_.resize(f_.dims.size());
    for (int i = 0; i < m_; ++i)
      for (std::size_t t = 0; t < f_.rows[static_cast<std::size_t>(i)].blocks.size(); ++t)
        rows_in_block_[static_cast<std::size_t>(f_.rows[static_cast<std::size_t>(i)].blocks[t].first)]
            .emplace_back(i, t);
  }

  SdpSolution run() {
    SdpSolution sol;
    init();
    double c_norm = f_.c.squaredNorm();
    for (const auto& C : f_.C) c_norm += C.squaredNorm();
    c_norm = std::sqrt(c_norm);
    const double b_norm = b_.norm();

    std::vector<double> pinf_hist;
    Iterate best = it_;
    for (int iter = 0;; ++iter) {
      const Residuals r = residuals();
      const double pobj = primal_objective();
      const double dobj = b_.dot(it_.y);
      const double pinf = r.rp.norm() / (1.0 + b_norm);
      const double dinf = r.dnorm / (1.0 + c_norm);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
      sol.iterations = iter;
      record(sol, pobj, dobj, pinf, dinf);
      best = it_;

      if (!std::isfinite(pobj) || !std::isfinite(dobj)) {
        sol.status = SolveStatus::MaxIterations;
        sol.diagnostics = "numerical breakdown: non-finite objective";
        break;
      }
      if (gap <= opt_.gap_tol && r.rp.lpNorm<Eigen::Infinity>() <= opt_.feas_tol && dinf <= opt_.feas_tol) {
        sol.status = SolveStatus::Optimal;
        break;
      }
      pinf_hist.push_back(pinf);
      if (dobj > 1e8 && pinf_hist.size() > 10 &&
          pinf > 0.9 * pinf_hist[pinf_hist.size() - 11] && pinf > opt_.feas_tol) {
        sol.status = SolveStatus::Infeasible;
        sol.diagnostics = "dual objective diverged while primal residual stagnated";
        break;
      }
      if (iter >= opt_.max_iter) {
        sol.status = SolveStatus::MaxIterations;
        sol.diagnostics = "iteration limit reached";
        break;
      }
      std::string why;
      if (!step(r, why)) {
        it_ = best;
        sol.status = SolveStatus::MaxIterations;
        sol.diagnostics = "numerical breakdown: " + why;
        break;
      }
    }
    sol.X_blocks = it_.X;
    sol.s = recover_scalars(f_, it_.x);
    // Rows removed in presolve keep a zero multiplier.
    sol.y = Eigen::VectorXd::Zero(f_.y_size);
    for (int i = 0; i < m_; ++i) sol.y(f_.row_origin[static_cast<std::size_t>(i)]) = it_.y(i);
    return sol;
  }

 private:
  struct Residuals {
    Eigen::VectorXd rp;
    std::vector<Eigen::MatrixXd> Rd;
    Eigen::VectorXd rd;
    double dnorm = 0.0;
  };

  // One common scale for all PSD blocks, so a start that is symmetric under
  // a permutation of identical blocks stays symmetric along the path.
  void init() {
    const auto nb = f_.dims.size();
    it_.X.resize(nb);
    it_.Z.resize(nb);
    double xs = 10.0, zs = 10.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const int n = f_.dims[b];
      xs = std::max(xs, std::sqrt(static_cast<double>(n)));
      zs = std::max({zs, std::sqrt(static_cast<double>(n)), f_.C[b].norm()});
      for (const auto& [i, t] : rows_in_block_[b]) {
        const auto& A = f_.rows[static_cast<std::size_t>(i)].blocks[t].second;
        xs = std::max(xs, n * (1.0 + std::abs(b_(i))) / (1.0 + A.norm()));
        zs = std::max(zs, A.norm());
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      it_.X[b] = xs * Eigen::MatrixXd::Identity(f_.dims[b], f_.dims[b]);
      it_.Z[b] = zs * Eigen::MatrixXd::Identity(f_.dims[b], f_.dims[b]);
    }
    double xi = 10.0, eta = std::max(10.0, f_.c.norm());
    for (int i = 0; i < m_; ++i)
      for (const auto& [k, a] : f_.rows[static_cast<std::size_t>(i)].lp) {
        xi = std::max(xi, (1.0 + std::abs(b_(i))) / (1.0 + std::abs(a)));
        eta = std::max(eta, std::abs(a));
      }
    it_.x = Eigen::VectorXd::Constant(f_.lp_dim, xi);
    it_.z = Eigen::VectorXd::Constant(f_.lp_dim, eta);
    it_.y = Eigen::VectorXd::Zero(m_);
  }

  Eigen::VectorXd apply_A(const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& row = f_.rows[static_cast<std::size_t>(i)];
      double v = 0.0;
      for (const auto& [blk, A] : row.blocks) v += frob_inner(A, X[static_cast<std::size_t>(blk)]);
      for (const auto& [k, a] : row.lp) v += a * x(k);
      out(i) = v;
    }
    return out;
  }

  void apply_At(const Eigen::VectorXd& y, std::vector<Eigen::MatrixXd>& S, Eigen::VectorXd& s) const {
    S.resize(f_.dims.size());
    for (std::size_t b = 0; b < f_.dims.size(); ++b) S[b] = Eigen::MatrixXd::Zero(f_.dims[b], f_.dims[b]);
    s = Eigen::VectorXd::Zero(f_.lp_dim);
    for (int i = 0; i < m_; ++i) {
      const auto& row = f_.rows[static_cast<std::size_t>(i)];
      for (const auto& [blk, A] : row.blocks) S[static_cast<std::size_t>(blk)] += y(i) * A;
      for (const auto& [k, a] : row.lp) s(k) += y(i) * a;
    }
  }

  double primal_objective() const {
    double v = f_.c.dot(it_.x);
    for (std::size_t b = 0; b < f_.dims.size(); ++b) v += frob_inner(f_.C[b], it_.X[b]);
    return v;
  }

  Residuals residuals() const {
    Residuals r;
    r.rp = b_ - apply_A(it_.X, it_.x);
    std::vector<Eigen::MatrixXd> AtY;
    Eigen::VectorXd aty;
    apply_At(it_.y, AtY, aty);
    r.Rd.resize(f_.dims.size());
    double dn = 0.0;
    for (std::size_t b = 0; b < f_.dims.size(); ++b) {
      r.Rd[b] = f_.C[b] - AtY[b] - it_.Z[b];
      dn += r.Rd[b].squaredNorm();
    }
    r.rd = f_.c - aty - it_.z;
    r.dnorm = std::sqrt(dn + r.rd.squaredNorm());
    return r;
  }

  double mu() const {
    double v = it_.x.dot(it_.z);
    for (std::size_t b = 0; b < f_.dims.size(); ++b) v += frob_inner(it_.X[b], it_.Z[b]);
    return v / static_cast<double>(nu_);
  }

  void record(SdpSolution& sol, double pobj, double dobj, double pinf, double dinf) const {
    sol.primal_objective = pobj + f_.objective_offset;
    sol.dual_objective = dobj + f_.objective_offset;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;
    sol.gap = std::abs(sol.primal_objective - sol.dual_objective) / (1.0 + std::abs(sol.primal_objective));
  }

  bool nt_scaling(std::vector<NtBlock>& nt, std::string& why) const {
    nt.resize(f_.dims.size());
    for (std::size_t b = 0; b < f_.dims.size(); ++b) {
      const int n = f_.dims[b];
      Eigen::LLT<Eigen::MatrixXd> llt(it_.X[b]);
      if (llt.info() != Eigen::Success) {
        why = "X block not positive definite";
        return false;
      }
      const Eigen::MatrixXd L = llt.matrixL();
      Eigen::MatrixXd S = L.transpose() * it_.Z[b] * L;
      S = 0.5 * (S + S.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      const Eigen::VectorXd d = es.eigenvalues();
      if (es.info() != Eigen::Success || d.minCoeff() <= 0.0) {
        why = "Z block not positive definite";
        return false;
      }
      const Eigen::MatrixXd& U = es.eigenvectors();
      const Eigen::VectorXd d14 = d.array().pow(0.25);
      auto& s = nt[b];
      s.G = L * U * (1.0 / d14.array()).matrix().asDiagonal();
      s.W = s.G * s.G.transpose();
      s.W = 0.5 * (s.W + s.W.transpose());
      const Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
      s.Ginv = d14.asDiagonal() * U.transpose() * Linv;
      s.v = d.array().sqrt();
    }
    return true;
  }

  bool step(const Residuals& r, std::string& why) {
    std::vector<NtBlock> nt;
    if (!nt_scaling(nt, why)) return false;
    const Eigen::VectorXd w_lp = it_.x.cwiseQuotient(it_.z);
    const Eigen::VectorXd g_lp = w_lp.cwiseSqrt();
    const Eigen::VectorXd v_lp = it_.x.cwiseProduct(it_.z).cwiseSqrt();

    // W A_j W for every block term of every row.
    std::vector<std::vector<Eigen::MatrixXd>> WAW(static_cast<std::size_t>(m_));
    for (int j = 0; j < m_; ++j) {
      const auto& row = f_.rows[static_cast<std::size_t>(j)];
      for (const auto& [blk, A] : row.blocks) {
        const auto& W = nt[static_cast<std::size_t>(blk)].W;
        WAW[static_cast<std::size_t>(j)].push_back(W * A * W);
      }
    }
    Eigen::MatrixXd Msch = Eigen::MatrixXd::Zero(m_, m_);
    for (std::size_t b = 0; b < f_.dims.size(); ++b) {
      const auto& list = rows_in_block_[b];
      for (std::size_t p = 0; p < list.size(); ++p)
        for (std::size_t q = p; q < list.size(); ++q) {
          const auto [i, ti] = list[p];
          const auto [j, tj] = list[q];
          const double v = frob_inner(f_.rows[static_cast<std::size_t>(i)].blocks[ti].second,
                                      WAW[static_cast<std::size_t>(j)][tj]);
          Msch(i, j) += v;
          if (i != j) Msch(j, i) += v;
        }
    }
    // LP part: sum_k a_ik a_jk w_k, via a sparse row representation.
    std::vector<std::vector<std::pair<int, double>>> lp_cols(static_cast<std::size_t>(f_.lp_dim));
    for (int i = 0; i < m_; ++i)
      for (const auto& [k, a] : f_.rows[static_cast<std::size_t>(i)].lp)
        lp_cols[static_cast<std::size_t>(k)].emplace_back(i, a);
    for (int k = 0; k < f_.lp_dim; ++k)
      for (const auto& [i, ai] : lp_cols[static_cast<std::size_t>(k)])
        for (const auto& [j, aj] : lp_cols[static_cast<std::size_t>(k)]) Msch(i, j) += ai * aj * w_lp(k);

    Eigen::LLT<Eigen::MatrixXd> chol(Msch);
    double reg = 1e-12 * std::max(1.0, Msch.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; chol.info() != Eigen::Success; ++attempt) {
      if (attempt == 6) {
        why = "Schur complement factorization failed";
        return false;
      }
      chol.compute(Msch + reg * Eigen::MatrixXd::Identity(m_, m_));
      reg *= 100.0;
    }

    // Solve for a direction given complementarity targets in the scaled space.
    auto solve_dir = [&](const std::vector<Eigen::MatrixXd>& Rs, const Eigen::VectorXd& rlp) {
      Direction d;
      std::vector<Eigen::MatrixXd> T(f_.dims.size());
      for (std::size_t b = 0; b < f_.dims.size(); ++b) {
        const auto& s = nt[b];
        const int n = f_.dims[b];
        Eigen::MatrixXd H(n, n);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) H(k, l) = 2.0 * Rs[b](k, l) / (s.v(k) + s.v(l));
        T[b] = s.G * H * s.G.transpose() - s.W * r.Rd[b] * s.W;
      }
      const Eigen::VectorXd hlp = rlp.cwiseQuotient(v_lp);
      const Eigen::VectorXd t = g_lp.cwiseProduct(hlp) - w_lp.cwiseProduct(r.rd);
      const Eigen::VectorXd rhs = r.rp - apply_A(T, t);
      d.dy = chol.solve(rhs);

      std::vector<Eigen::MatrixXd> AtDy;
      Eigen::VectorXd atdy;
      apply_At(d.dy, AtDy, atdy);
      d.dX.resize(f_.dims.size());
      d.dZ.resize(f_.dims.size());
      for (std::size_t b = 0; b < f_.dims.size(); ++b) {
        d.dX[b] = T[b];
        d.dZ[b] = r.Rd[b] - AtDy[b];
      }
      for (int j = 0; j < m_; ++j) {
        const auto& row = f_.rows[static_cast<std::size_t>(j)];
        for (std::size_t t2 = 0; t2 < row.blocks.size(); ++t2)
          d.dX[static_cast<std::size_t>(row.blocks[t2].first)] += d.dy(j) * WAW[static_cast<std::size_t>(j)][t2];
      }
      for (auto& M : d.dX) M = 0.5 * (M + M.transpose()).eval();
      for (auto& M : d.dZ) M = 0.5 * (M + M.transpose()).eval();
      d.dx = t + w_lp.cwiseProduct(atdy);
      d.dz = r.rd - atdy;
      return d;
    };

    auto step_lengths = [&](const Direction& d, double tau, double& ap, double& ad) -> bool {
      ap = max_lp_step(it_.x, d.dx);
      ad = max_lp_step(it_.z, d.dz);
      for (std::size_t b = 0; b < f_.dims.size(); ++b) {
        bool ok = true;
        ap = std::min(ap, max_psd_step(it_.X[b], d.dX[b], ok));
        ad = std::min(ad, max_psd_step(it_.Z[b], d.dZ[b], ok));
        if (!ok) return false;
      }
      ap = std::min(1.0, tau * ap);
      ad = std::min(1.0, tau * ad);
      return true;
    };

    const double mu0 = mu();
    // Predictor: target V o (dX~ + dZ~) = -V^2.
    std::vector<Eigen::MatrixXd> Rs(f_.dims.size());
    for (std::size_t b = 0; b < f_.dims.size(); ++b) Rs[b] = Eigen::MatrixXd((-nt[b].v.array().square()).matrix().asDiagonal());
    Eigen::VectorXd rlp = -v_lp.array().square().matrix();
    const Direction aff = solve_dir(Rs, rlp);
    double ap = 0.0, ad = 0.0;
    if (!step_lengths(aff, 1.0, ap, ad)) {
      why = "step length computation failed";
      return false;
    }
    double mu_aff = (it_.x + ap * aff.dx).dot(it_.z + ad * aff.dz);
    for (std::size_t b = 0; b < f_.dims.size(); ++b)
      mu_aff += frob_inner(it_.X[b] + ap * aff.dX[b], it_.Z[b] + ad * aff.dZ[b]);
    mu_aff /= static_cast<double>(nu_);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu0, 3.0), 0.0, 1.0);

    // Corrector: sigma mu I - V^2 - (dX~_aff o dZ~_aff).
    for (std::size_t b = 0; b < f_.dims.size(); ++b) {
      const auto& s = nt[b];
      const Eigen::MatrixXd dXs = s.Ginv * aff.dX[b] * s.Ginv.transpose();
      const Eigen::MatrixXd dZs = s.G.transpose() * aff.dZ[b] * s.G;
      const Eigen::MatrixXd jordan = 0.5 * (dXs * dZs + dZs * dXs);
      Rs[b] = sigma * mu0 * Eigen::MatrixXd::Identity(f_.dims[b], f_.dims[b]);
      Rs[b].diagonal() -= s.v.array().square().matrix();
      Rs[b] -= jordan;
    }
    rlp = (sigma * mu0 - v_lp.array().square() - aff.dx.array() * aff.dz.array()).matrix();
    const Direction d = solve_dir(Rs, rlp);
    if (!step_lengths(d, 0.98, ap, ad)) {
      why = "step length computation failed";
      return false;
    }
    // Roundoff can leave the boundary step slightly outside the cone.
    auto pd_after = [&](const std::vector<Eigen::MatrixXd>& V, const std::vector<Eigen::MatrixXd>& dV, double a) {
      for (std::size_t b = 0; b < V.size(); ++b)
        if (Eigen::LLT<Eigen::MatrixXd>(V[b] + a * dV[b]).info() != Eigen::Success) return false;
      return true;
    };
    for (int k = 0; k < 30 && !pd_after(it_.X, d.dX, ap); ++k) ap *= 0.8;
    for (int k = 0; k < 30 && !pd_after(it_.Z, d.dZ, ad); ++k) ad *= 0.8;
    for (std::size_t b = 0; b < f_.dims.size(); ++b) {
      it_.X[b] += ap * d.dX[b];
      it_.Z[b] += ad * d.dZ[b];
    }
    it_.x += ap * d.dx;
    it_.z += ad * d.dz;
    it_.y += ad * d.dy;
    for (const auto& M : it_.X)
      if (!M.allFinite()) {
        why = "non-finite iterate";
        return false;
      }
    return true;
  }

  const ConicForm& f_;
  SolverOptions opt_;
  int m_ = 0;
  int nu_ = 0;
  Eigen::VectorXd b_;
  std::vector<std::vector<std::pair<int, std::size_t>>> rows_in_block_;
  Iterate it_;
};

}  // namespace detail

/// Solve a real SDP. Status Optimal guarantees gap <= gap_tol and every
/// constraint and bound satisfied within feas_tol.
inline SdpSolution solve(const SdpProblem<double>& p, const SolverOptions& opt = {}) {
  const auto errs = check_problem(p);
  if (!errs.empty()) throw Error(ErrorCode::InvalidInput, "malformed SDP: " + errs.front());
  const detail::ConicForm form = detail::to_conic(p);
  SdpSolution sol = detail::InteriorPoint(form, opt).run();
  sol.max_violation = max_violation(p, sol.X_blocks, sol.s);
  if (sol.status == SolveStatus::Optimal && sol.max_violation > opt.feas_tol) {
    sol.status = SolveStatus::MaxIterations;
    sol.diagnostics = "converged but constraint violation " + std::to_string(sol.max_violation) +
                      " exceeds tolerance";
  }
  return sol;
}

}  // namespace mbqcqp
