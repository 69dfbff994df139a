#pragma once

// Gaussian randomization: fix the binary assignment once from the relaxed
// weights, then per trial draw xi^(q) ~ N(0, X^(q)) for every slot and scale
// it just enough to meet every constraint assigned to that slot. The best
// feasible trial wins.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "mbqcqp/bounds.hpp"
#include "mbqcqp/core_types.hpp"
#include "mbqcqp/rng.hpp"

namespace mbqcqp {

/// Factorization A A^H = covariance used to draw xi = A z.
class GaussianSampler {
 public:
  GaussianSampler(const Eigen::MatrixXcd& covariance, Field field) : cov_(covariance), field_(field) {
    const Eigen::Index n = covariance.rows();
    if (field == Field::Real) {
      const Eigen::MatrixXd C = covariance.real();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
      factor_ = build(es.eigenvectors().cast<cplx>(), es.eigenvalues(), C.trace());
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (covariance + covariance.adjoint()));
      factor_ = build(es.eigenvectors(), es.eigenvalues(), covariance.trace().real());
    }
    zero_ = factor_.size() == 0 || factor_.cwiseAbs().maxCoeff() == 0.0;
    if (n == 0) zero_ = true;
  }

  const Eigen::MatrixXcd& covariance() const { return cov_; }
  const Eigen::MatrixXcd& factor() const { return factor_; }
  Field field() const { return field_; }
  Eigen::Index dim() const { return cov_.rows(); }
  /// True when every eigenvalue was clipped.
  bool is_zero() const { return zero_; }

 private:
  static Eigen::MatrixXcd build(const Eigen::MatrixXcd& U, const Eigen::VectorXd& lambda, double trace) {
    const double cut = 1e-9 * std::max(trace, 0.0);
    Eigen::VectorXd root(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
      root(k) = lambda(k) > cut && lambda(k) > 0.0 ? std::sqrt(lambda(k)) : 0.0;
    return U * root.cast<cplx>().asDiagonal();
  }

  Eigen::MatrixXcd cov_;
  Eigen::MatrixXcd factor_;
  Field field_;
  bool zero_ = false;
};

/// Real: xi = A z with z standard normal. Complex: z_k = (a + i b)/sqrt(2).
/// Always consumes N (real) or 2N (complex) normals.
inline Eigen::VectorXcd sample(const GaussianSampler& s, RandomStream& rng) {
  const Eigen::Index n = s.dim();
  Eigen::VectorXcd z(n);
  if (s.field() == Field::Real) {
    for (Eigen::Index k = 0; k < n; ++k) z(k) = cplx(rng.normal(), 0.0);
  } else {
    const double r = std::sqrt(0.5);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double a = rng.normal();
      const double b = rng.normal();
      z(k) = cplx(r * a, r * b);
    }
  }
  return s.factor() * z;
}

struct BinaryP1 {
  Eigen::VectorXi beta;
  std::vector<std::size_t> active;  // users with beta = 1
};

/// beta_i = 1 iff alpha_i >= 1/2.
inline BinaryP1 round_binary_p1(const Eigen::VectorXd& alpha) {
  BinaryP1 out;
  out.beta = Eigen::VectorXi::Zero(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    if (alpha(i) >= 0.5) {
      out.beta(i) = 1;
      out.active.push_back(static_cast<std::size_t>(i));
    }
  return out;
}

/// The P slots with the largest weights, ties to the lowest index; returned
/// in increasing slot order.
inline std::vector<int> select_top_slots(const Eigen::VectorXd& alpha_row, int P) {
  const int Q = static_cast<int>(alpha_row.size());
  if (P < 1 || P > Q) throw Error(ErrorCode::InvalidInput, "slot count outside [1, Q]");
  std::vector<int> idx(static_cast<std::size_t>(Q));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return alpha_row(a) > alpha_row(b); });
  idx.resize(static_cast<std::size_t>(P));
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct ScaleResult {
  double t = 0.0;
  bool degenerate = false;
};

/// t = max_i (xi^H H_i xi)^(-1/2) over the set; 0 for an empty set.
inline ScaleResult scale_factor(const Eigen::VectorXcd& xi, const std::vector<OuterProductMatrix>& H_set) {
  ScaleResult r;
  const double xn = xi.squaredNorm();
  for (const auto& H : H_set) {
    const double q = (xi.adjoint() * H.matrix * xi)(0, 0).real();
    if (q <= 1e-14 * xn * H.matrix.trace().real()) {
      r.degenerate = true;
      r.t = 0.0;
      return r;
    }
    r.t = std::max(r.t, 1.0 / std::sqrt(q));
  }
  return r;
}

struct TrialOutcome {
  std::vector<Eigen::VectorXcd> w_blocks;
  std::vector<double> t;         // per slot
  std::vector<double> xi_norm2;  // ||xi^(q)||^2 per slot
  double objective = std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool degenerate = false;
  bool success_event = false;
};

/// max_q t_q^2 <= alpha_thresh and sum_q ||xi^(q)||^2 <= 3 sum_q tr X^(q).
/// Implies objective <= mu * relaxation objective.
inline bool trial_success_event(const TrialOutcome& trial, const RelaxationSolution& relax,
                                const BoundReport& report) {
  double tmax = 0.0, xsum = 0.0;
  for (double t : trial.t) tmax = std::max(tmax, t * t);
  for (double x : trial.xi_norm2) xsum += x;
  double tr = 0.0;
  for (const auto& X : relax.X_blocks) tr += X.trace().real();
  return tmax <= report.alpha_thresh && xsum <= 3.0 * tr;
}

/// Everything a trial needs; built once per rounding run.
struct RoundingPlan {
  Field field = Field::Real;
  std::vector<Channel> channels;
  Eigen::MatrixXi beta;                               // M x Q
  std::vector<std::vector<OuterProductMatrix>> H;     // active set per slot
  std::vector<GaussianSampler> samplers;              // one per slot
  RelaxationSolution relax;
  BoundReport bound;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr int kMaxResamples = 100;

inline RoundingPlan make_plan(Field field, const std::vector<Channel>& channels, Eigen::MatrixXi beta,
                              const RelaxationSolution& relax, const BoundReport& bound, std::uint64_t seed) {
  RoundingPlan plan{field, channels, std::move(beta), {}, {}, relax, bound, seed};
  const auto Q = static_cast<std::size_t>(plan.beta.cols());
  if (relax.X_blocks.size() != Q)
    throw Error(ErrorCode::InvalidInput, "relaxation has the wrong number of slots");
  plan.H.resize(Q);
  for (std::size_t q = 0; q < Q; ++q) {
    for (Eigen::Index i = 0; i < plan.beta.rows(); ++i)
      if (plan.beta(i, static_cast<Eigen::Index>(q)) == 1)
        plan.H[q].push_back(outer_product(channels[static_cast<std::size_t>(i)]));
    plan.samplers.emplace_back(relax.X_blocks[q], field);
    if (!plan.H[q].empty() && plan.samplers.back().is_zero())
      throw Error(ErrorCode::DegenerateCovariance,
                  "slot " + std::to_string(q) + " serves users but its covariance is numerically zero");
  }
  return plan;
}

}  // namespace detail

/// One trial; a pure function of (plan, trial index).
inline TrialOutcome run_trial(const RoundingPlan& plan, std::uint64_t trial) {
  RandomStream rng(plan.seed, trial);
  TrialOutcome out;
  const auto Q = plan.samplers.size();
  out.w_blocks.resize(Q);
  out.t.assign(Q, 0.0);
  out.xi_norm2.assign(Q, 0.0);
  double obj = 0.0;
  for (std::size_t q = 0; q < Q; ++q) {
    Eigen::VectorXcd xi;
    ScaleResult sr;
    for (int k = 0; k < detail::kMaxResamples; ++k) {
      xi = sample(plan.samplers[q], rng);
      sr = scale_factor(xi, plan.H[q]);
      if (!sr.degenerate) break;
    }
    if (sr.degenerate) {
      out.degenerate = true;
      out.w_blocks[q] = Eigen::VectorXcd::Zero(xi.size());
      continue;
    }
    out.t[q] = sr.t;
    out.xi_norm2[q] = xi.squaredNorm();
    out.w_blocks[q] = sr.t * xi;
    obj += out.w_blocks[q].squaredNorm();
  }
  if (out.degenerate) return out;
  out.objective = obj;
  out.feasible = max_constraint_shortfall(plan.channels, plan.beta, out.w_blocks) <= kFeasibilityTol;
  out.success_event = trial_success_event(out, plan.relax, plan.bound);
  return out;
}

using TrialObserver = std::function<void(std::uint64_t, const TrialOutcome&)>;

/// Best feasible of T trials (lowest index among equal objectives).
inline RoundedSolution run_trials(const RoundingPlan& plan, std::size_t T, const TrialObserver& observer = {}) {
  RoundedSolution best;
  best.beta = plan.beta;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < plan.samplers.size(); ++q)
    best.w_blocks.push_back(Eigen::VectorXcd::Zero(plan.samplers[q].dim()));
  for (std::uint64_t k = 0; k < T; ++k) {
    TrialOutcome o = run_trial(plan, k);
    if (observer) observer(k, o);
    ++best.trials_used;
    if (o.degenerate) ++best.degenerate_trials;
    if (o.success_event) ++best.success_events;
    if (o.feasible && o.objective < best.objective) {
      best.objective = o.objective;
      best.w_blocks = std::move(o.w_blocks);
      best.success = true;
    }
  }
  return best;
}

inline RoundingPlan plan_p1(const InstanceP1& inst, const RelaxationSolution& relax, std::uint64_t seed) {
  require_valid(inst);
  if (relax.alpha.rows() != static_cast<Eigen::Index>(inst.M()) || relax.alpha.cols() != 2)
    throw Error(ErrorCode::InvalidInput, "relaxation does not match the two-slot instance");
  const BinaryP1 b = round_binary_p1(relax.alpha.col(0));
  Eigen::MatrixXi beta(b.beta.size(), 2);
  beta.col(0) = b.beta;
  beta.col(1) = Eigen::VectorXi::Ones(b.beta.size()) - b.beta;
  return detail::make_plan(inst.field, inst.channels, std::move(beta), relax, mu_p1(inst.M(), inst.field), seed);
}

inline RoundingPlan plan_p2(const InstanceP2& inst, const RelaxationSolution& relax, std::uint64_t seed) {
  require_valid(inst);
  if (relax.alpha.rows() != static_cast<Eigen::Index>(inst.M()) || relax.alpha.cols() != inst.Q)
    throw Error(ErrorCode::InvalidInput, "relaxation does not match the Q-slot instance");
  Eigen::MatrixXi beta = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(inst.M()), inst.Q);
  for (Eigen::Index i = 0; i < beta.rows(); ++i)
    for (int q : select_top_slots(relax.alpha.row(i).transpose(), inst.priorities[static_cast<std::size_t>(i)]))
      beta(i, q) = 1;
  return detail::make_plan(inst.field, inst.channels, std::move(beta), relax,
                           mu_p2(inst.priorities, inst.Q, inst.field), seed);
}

/// Two-slot randomization. Trial k draws from stream (seed, k).
inline RoundedSolution round_p1(const InstanceP1& inst, const RelaxationSolution& relax, std::size_t T,
                                std::uint64_t seed, const TrialObserver& observer = {}) {
  return run_trials(plan_p1(inst, relax, seed), T, observer);
}

/// Q-slot randomization. Trial k draws from stream (seed, k).
inline RoundedSolution round_p2(const InstanceP2& inst, const RelaxationSolution& relax, std::size_t T,
                                std::uint64_t seed, const TrialObserver& observer = {}) {
  return run_trials(plan_p2(inst, relax, seed), T, observer);
}

}  // namespace mbqcqp
