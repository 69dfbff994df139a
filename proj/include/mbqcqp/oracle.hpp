#pragma once

// Brute-force reference for small instances. Every binary assignment splits
// the users into per-slot groups; each group's problem
//
//   min ||w||^2  s.t.  |h_i^H w|^2 >= 1  (i in group)
//
// is bracketed below by its semidefinite relaxation (dual objective) and
// above by randomization from the relaxation's solution. Groups are cached
// by user mask, and the randomization stream of a group depends only on its
// mask, so the same group gets the same bracket under either model.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "mbqcqp/core_types.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/rounding.hpp"
#include "mbqcqp/sdp_solver.hpp"

namespace mbqcqp {

struct OracleOptions {
  std::size_t trials = 200;  // randomization trials per group
  std::uint64_t seed = 0;
  unsigned threads = 1;
  SolverOptions solver{};
};

struct OracleBracket {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool certified = false;          // upper - lower <= 1e-4 (1 + lower)
  Eigen::MatrixXi argmin_beta;     // assignment attaining upper
  std::vector<Eigen::VectorXcd> upper_w;
  std::size_t assignments = 0;
};

/// Exact value for an empty, singleton or mutually orthogonal group.
inline std::optional<double> closed_form_subproblem(const std::vector<Channel>& group) {
  double v = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double c = std::abs(group[i].entries.dot(group[j].entries));
      if (c > kStructuralTol * std::sqrt(group[i].norm2() * group[j].norm2())) return std::nullopt;
    }
    v += 1.0 / group[i].norm2();
  }
  return v;
}

struct GroupBracket {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd w;  // attains upper
};

namespace detail {

inline std::vector<std::size_t> mask_users(std::uint64_t mask, std::size_t M) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < M; ++i)
    if (mask >> i & 1u) out.push_back(i);
  return out;
}

/// min tr X s.t. tr(H_i X) >= 1 for the group.
inline SdpProblem<cplx> build_group_sdr(Eigen::Index N, const std::vector<Channel>& group) {
  SdpProblem<cplx> p;
  p.add_block(static_cast<int>(N), Eigen::MatrixXcd::Identity(N, N));
  for (const auto& h : group) p.constraints.push_back({{{0, outer_product(h).matrix}}, {}, 1.0});
  return p;
}

inline GroupBracket bracket_group(Field field, Eigen::Index N, const std::vector<Channel>& channels,
                                  std::uint64_t mask, const OracleOptions& opt) {
  const auto users = mask_users(mask, channels.size());
  std::vector<Channel> group;
  for (auto i : users) group.push_back(channels[i]);
  GroupBracket g;
  if (const auto exact = closed_form_subproblem(group)) {
    g.lower = g.upper = *exact;
    g.w = Eigen::VectorXcd::Zero(N);
    for (const auto& h : group) g.w += h.entries / h.norm2();
    return g;
  }
  const SdpSolution sol = solve(prepare_for_solver(build_group_sdr(N, group), field), opt.solver);
  if (sol.status != SolveStatus::Optimal)
    throw Error(ErrorCode::RelaxationFailed, "group relaxation: " + sol.diagnostics);
  g.lower = std::min(sol.dual_objective, sol.primal_objective);

  RelaxationSolution relax;
  relax.X_blocks = back_map_blocks(sol, field);
  relax.alpha = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(group.size()), 1);
  relax.objective = trace_sum(relax.X_blocks);
  const RoundingPlan plan = make_plan(field, group, Eigen::MatrixXi::Ones(relax.alpha.rows(), 1), relax,
                                      mu_p1(group.size(), field), derive_key(opt.seed, mask));
  const RoundedSolution r = run_trials(plan, opt.trials);
  if (r.success) {
    g.upper = r.objective;
    g.w = r.w_blocks[0];
  }
  return g;
}

/// Bracket every mask, in parallel; results indexed like `masks`.
inline std::vector<GroupBracket> bracket_groups(Field field, Eigen::Index N, const std::vector<Channel>& channels,
                                                const std::vector<std::uint64_t>& masks, const OracleOptions& opt) {
  std::vector<GroupBracket> out(masks.size());
  std::vector<std::exception_ptr> errors(masks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < masks.size();) {
      try {
        out[k] = bracket_group(field, N, channels, masks[k], opt);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(masks.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline void finish(OracleBracket& b) {
  b.certified = b.upper - b.lower <= 1e-4 * (1.0 + b.lower);
}

}  // namespace detail

/// All 2^M splits into two slots. Bit i of the split mask puts user i in slot 1.
inline OracleBracket enumerate_p1(const InstanceP1& inst, const OracleOptions& opt = {}) {
  require_valid(inst);
  const std::size_t M = inst.M();
  if (M > 12) throw Error(ErrorCode::EnumerationTooLarge, "two-slot enumeration is capped at 12 users");
  const std::uint64_t full = (std::uint64_t{1} << M) - 1;
  std::vector<std::uint64_t> masks(full + 1);
  for (std::uint64_t m = 0; m <= full; ++m) masks[m] = m;
  const auto groups = detail::bracket_groups(inst.field, inst.N, inst.channels, masks, opt);

  OracleBracket b;
  b.lower = std::numeric_limits<double>::infinity();
  std::uint64_t best = 0;
  for (std::uint64_t m = 0; m <= full; ++m) {
    const auto& g1 = groups[m];
    const auto& g2 = groups[full ^ m];
    b.lower = std::min(b.lower, g1.lower + g2.lower);
    if (g1.upper + g2.upper < b.upper) {
      b.upper = g1.upper + g2.upper;
      best = m;
    }
  }
  b.assignments = full + 1;
  b.argmin_beta = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(M), 2);
  for (std::size_t i = 0; i < M; ++i) b.argmin_beta(static_cast<Eigen::Index>(i), (best >> i & 1u) ? 0 : 1) = 1;
  b.upper_w = {groups[best].w, groups[full ^ best].w};
  detail::finish(b);
  return b;
}

/// Minimal assignments only: user i sits in exactly P_i slots.
inline OracleBracket enumerate_p2(const InstanceP2& inst, const OracleOptions& opt = {}) {
  require_valid(inst);
  const std::size_t M = inst.M();
  const int Q = inst.Q;
  if (M > 63 || Q > 20) throw Error(ErrorCode::EnumerationTooLarge, "too many users or slots");

  // Slot patterns per user, each a Q-bit mask with popcount P_i.
  std::vector<std::vector<std::uint32_t>> patterns(M);
  double count = 1.0;
  for (std::size_t i = 0; i < M; ++i) {
    for (std::uint32_t s = 0; s < (1u << Q); ++s)
      if (std::popcount(s) == inst.priorities[i]) patterns[i].push_back(s);
    count *= static_cast<double>(patterns[i].size());
    if (count > 1e5)
      throw Error(ErrorCode::EnumerationTooLarge, "more than 1e5 minimal assignments");
  }

  // Walk all assignments in mixed-radix order, collecting the slot groups.
  const auto total = static_cast<std::size_t>(count);
  std::vector<std::vector<std::uint64_t>> slot_masks(total, std::vector<std::uint64_t>(static_cast<std::size_t>(Q)));
  std::vector<std::size_t> digit(M, 0);
  std::map<std::uint64_t, std::size_t> index;
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t i = 0; i < M; ++i)
      for (int q = 0; q < Q; ++q)
        if (patterns[i][digit[i]] >> q & 1u) slot_masks[a][static_cast<std::size_t>(q)] |= std::uint64_t{1} << i;
    for (auto m : slot_masks[a]) index.emplace(m, 0);
    for (std::size_t i = 0; i < M && ++digit[i] == patterns[i].size(); ++i) digit[i] = 0;
  }
  std::vector<std::uint64_t> masks;
  for (auto& [m, k] : index) {
    k = masks.size();
    masks.push_back(m);
  }
  const auto groups = detail::bracket_groups(inst.field, inst.N, inst.channels, masks, opt);

  OracleBracket b;
  b.lower = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t a = 0; a < total; ++a) {
    double lo = 0.0, up = 0.0;
    for (auto m : slot_masks[a]) {
      lo += groups[index[m]].lower;
      up += groups[index[m]].upper;
    }
    b.lower = std::min(b.lower, lo);
    if (up < b.upper) {
      b.upper = up;
      best = a;
    }
  }
  b.assignments = total;
  b.argmin_beta = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(M), Q);
  for (int q = 0; q < Q; ++q) {
    const auto m = slot_masks[best][static_cast<std::size_t>(q)];
    for (std::size_t i = 0; i < M; ++i)
      if (m >> i & 1u) b.argmin_beta(static_cast<Eigen::Index>(i), q) = 1;
    b.upper_w.push_back(groups[index[m]].w);
  }
  detail::finish(b);
  return b;
}

}  // namespace mbqcqp
