#pragma once

// Semidefinite relaxations of the two assignment models: X^(q) replaces
// w_q w_q^H and the binaries become box variables in [0, 1].

#include <algorithm>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "mbqcqp/core_types.hpp"
#include "mbqcqp/sdp_problem.hpp"
#include "mbqcqp/sdp_solver.hpp"

namespace mbqcqp {

enum class RelaxationKind { Sdp1, Sdp2 };

/// Two-slot relaxation. Scalars: alpha_i at index i.
///   min tr X1 + tr X2
///   s.t. tr[H_i X1] - alpha_i >= 0,  tr[H_i X2] + alpha_i >= 1,  0 <= alpha_i <= 1.
inline SdpProblem<cplx> build_sdp1(const InstanceP1& inst) {
  require_valid(inst);
  const auto N = inst.N;
  const int n = static_cast<int>(N);
  SdpProblem<cplx> p;
  const int x1 = p.add_block(n, Eigen::MatrixXcd::Identity(N, N));
  const int x2 = p.add_block(n, Eigen::MatrixXcd::Identity(N, N));
  for (std::size_t i = 0; i < inst.M(); ++i) p.add_scalar({0.0, 1.0});
  for (std::size_t i = 0; i < inst.M(); ++i) {
    const Eigen::MatrixXcd H = outer_product(inst.channels[i]).matrix;
    const int a = static_cast<int>(i);
    p.constraints.push_back({{{x1, H}}, {{a, -1.0}}, 0.0});
    p.constraints.push_back({{{x2, H}}, {{a, 1.0}}, 1.0});
  }
  return p;
}

/// Index of alpha_i^(q) in the Q-slot relaxation.
inline int sdp2_scalar_index(std::size_t user, int slot, int Q) {
  return static_cast<int>(user) * Q + slot;
}

/// Q-slot relaxation.
///   min sum_q tr X^(q)
///   s.t. tr[H_i X^(q)] >= alpha_i^(q),  sum_q alpha_i^(q) >= P_i,  0 <= alpha <= 1.
inline SdpProblem<cplx> build_sdp2(const InstanceP2& inst) {
  require_valid(inst);
  const auto N = inst.N;
  const int Q = inst.Q;
  SdpProblem<cplx> p;
  for (int q = 0; q < Q; ++q) p.add_block(static_cast<int>(N), Eigen::MatrixXcd::Identity(N, N));
  for (std::size_t i = 0; i < inst.M(); ++i)
    for (int q = 0; q < Q; ++q) p.add_scalar({0.0, 1.0});
  for (std::size_t i = 0; i < inst.M(); ++i) {
    const Eigen::MatrixXcd H = outer_product(inst.channels[i]).matrix;
    for (int q = 0; q < Q; ++q)
      p.constraints.push_back({{{q, H}}, {{sdp2_scalar_index(i, q, Q), -1.0}}, 0.0});
  }
  for (std::size_t i = 0; i < inst.M(); ++i) {
    LinearConstraint<cplx> card;
    for (int q = 0; q < Q; ++q) card.scalars.push_back({sdp2_scalar_index(i, q, Q), 1.0});
    card.rhs = inst.priorities[i];
    p.constraints.push_back(std::move(card));
  }
  return p;
}

/// Real form handed to the solver: real parts for a real instance, the
/// symmetric embedding for a complex one.
inline SdpProblem<double> prepare_for_solver(const SdpProblem<cplx>& p, Field field) {
  return field == Field::Real ? to_real_problem(p) : embed_complex(p);
}

namespace detail {

inline double clamp_alpha(double a, double tol) {
  if (a < -tol || a > 1.0 + tol)
    throw Error(ErrorCode::RelaxationFailed,
                "relaxed weight " + std::to_string(a) + " outside [0,1] beyond tolerance");
  return std::clamp(a, 0.0, 1.0);
}

inline std::vector<Eigen::MatrixXcd> back_map_blocks(const SdpSolution& sol, Field field) {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& X : sol.X_blocks) {
    if (field == Field::Real) {
      out.emplace_back(X.cast<cplx>());
    } else {
      Eigen::MatrixXcd Xc = back_map(X);
      out.emplace_back(0.5 * (Xc + Xc.adjoint()));
    }
  }
  return out;
}

inline double trace_sum(const std::vector<Eigen::MatrixXcd>& blocks) {
  double v = 0.0;
  for (const auto& X : blocks) v += X.trace().real();
  return v;
}

}  // namespace detail

/// Average over all slot permutations. Both relaxations are invariant under
/// relabeling the slots, so the result is again optimal; it is the point an
/// exact central path from a symmetric start converges to. Interior-point
/// iterates wander along the optimal face in the last iterations, and without
/// this step the binary decisions taken from alpha would follow roundoff.
inline RelaxationSolution symmetrize_slots(RelaxationSolution r) {
  const auto Q = r.slots();
  if (Q < 2) return r;
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(r.X_blocks[0].rows(), r.X_blocks[0].cols());
  for (const auto& X : r.X_blocks) mean += X;
  mean /= static_cast<double>(Q);
  for (auto& X : r.X_blocks) X = mean;
  for (Eigen::Index i = 0; i < r.alpha.rows(); ++i) r.alpha.row(i).setConstant(r.alpha.row(i).mean());
  r.objective = detail::trace_sum(r.X_blocks);
  return r;
}

/// Relaxation solution of the two-slot model. alpha has columns
/// (alpha_i, 1 - alpha_i).
inline RelaxationSolution extract_solution(const InstanceP1& inst, const SdpSolution& sol,
                                           double feas_tol = kSolverTol, bool symmetrize = true) {
  if (sol.status != SolveStatus::Optimal)
    throw Error(ErrorCode::RelaxationFailed, "solver status " + std::string(to_string(sol.status)) +
                                                 (sol.diagnostics.empty() ? "" : ": " + sol.diagnostics));
  RelaxationSolution out;
  out.X_blocks = detail::back_map_blocks(sol, inst.field);
  const auto M = static_cast<Eigen::Index>(inst.M());
  out.alpha.resize(M, 2);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double a = detail::clamp_alpha(sol.s(i), feas_tol);
    out.alpha(i, 0) = a;
    out.alpha(i, 1) = 1.0 - a;
  }
  out.objective = detail::trace_sum(out.X_blocks);
  out.duality_gap = sol.gap;
  return symmetrize ? symmetrize_slots(std::move(out)) : out;
}

inline RelaxationSolution extract_solution(const InstanceP2& inst, const SdpSolution& sol,
                                           double feas_tol = kSolverTol, bool symmetrize = true) {
  if (sol.status != SolveStatus::Optimal)
    throw Error(ErrorCode::RelaxationFailed, "solver status " + std::string(to_string(sol.status)) +
                                                 (sol.diagnostics.empty() ? "" : ": " + sol.diagnostics));
  RelaxationSolution out;
  out.X_blocks = detail::back_map_blocks(sol, inst.field);
  const auto M = static_cast<Eigen::Index>(inst.M());
  out.alpha.resize(M, inst.Q);
  for (Eigen::Index i = 0; i < M; ++i)
    for (int q = 0; q < inst.Q; ++q)
      out.alpha(i, q) = detail::clamp_alpha(sol.s(sdp2_scalar_index(static_cast<std::size_t>(i), q, inst.Q)),
                                            feas_tol);
  out.objective = detail::trace_sum(out.X_blocks);
  out.duality_gap = sol.gap;
  return symmetrize ? symmetrize_slots(std::move(out)) : out;
}

/// Build, solve and extract in one go.
template <typename Instance>
RelaxationSolution solve_relaxation(const Instance& inst, const SolverOptions& opt = {},
                                    SdpSolution* raw = nullptr, bool symmetrize = true) {
  SdpProblem<cplx> p;
  if constexpr (std::is_same_v<Instance, InstanceP1>)
    p = build_sdp1(inst);
  else
    p = build_sdp2(inst);
  SdpSolution sol = solve(prepare_for_solver(p, inst.field), opt);
  RelaxationSolution out = extract_solution(inst, sol, opt.feas_tol, symmetrize);
  if (raw) *raw = std::move(sol);
  return out;
}

}  // namespace mbqcqp
