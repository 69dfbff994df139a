#pragma once

// Domain data model for the two mixed-binary beamforming problems:
//
//   (two-slot)  min ||w1||^2 + ||w2||^2
//               s.t. w1^H H_i w1 >= beta_i, w2^H H_i w2 >= 1 - beta_i
//   (Q-slot)    min sum_q ||w_q||^2
//               s.t. w_q^H H_i w_q >= beta_i^(q), sum_q beta_i^(q) >= P_i
//
// with H_i = h_i h_i^H and binary beta. Channels are stored as complex
// vectors regardless of the field; a Real instance has exactly zero
// imaginary parts everywhere.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mbqcqp {

using cplx = std::complex<double>;

enum class Field { Real, Complex };
enum class Model { P1, P2 };

inline std::string_view to_string(Field f) { return f == Field::Real ? "real" : "complex"; }
inline std::string_view to_string(Model m) { return m == Model::P1 ? "p1" : "p2"; }

enum class ErrorCode {
  InvalidInput,
  ZeroChannel,
  NonHermitian,
  RelaxationFailed,
  DegenerateCovariance,
  EnumerationTooLarge,
  ParseError,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ZeroChannel: return "ZeroChannel";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::RelaxationFailed: return "RelaxationFailed";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Tolerance tiers: exact identities, solver output, rounded feasibility.
inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kSolverTol = 1e-8;
inline constexpr double kFeasibilityTol = 1e-7;

struct Channel {
  Eigen::VectorXcd entries;

  Eigen::Index size() const { return entries.size(); }
  double norm2() const { return entries.squaredNorm(); }
};

struct OuterProductMatrix {
  Channel source;
  Eigen::MatrixXcd matrix;  // h h^H
};

/// H = h h^H. Throws ZeroChannel for h = 0.
inline OuterProductMatrix outer_product(const Channel& h) {
  if (h.entries.size() == 0 || h.norm2() == 0.0)
    throw Error(ErrorCode::ZeroChannel, "outer product of a zero channel");
  return {h, h.entries * h.entries.adjoint()};
}

struct InstanceP1 {
  Field field = Field::Real;
  Eigen::Index N = 0;
  std::vector<Channel> channels;

  std::size_t M() const { return channels.size(); }
};

struct InstanceP2 {
  Field field = Field::Real;
  Eigen::Index N = 0;
  std::vector<Channel> channels;
  int Q = 1;
  std::vector<int> priorities;  // P_i, one per user

  std::size_t M() const { return channels.size(); }
};

// Severity::Assumption marks a standing modelling assumption (M >= 2, N >= 2)
// that the approximation guarantees rely on but the algorithms do not.
enum class Severity { Error, Assumption };

struct Violation {
  std::string code;
  std::string message;
  Severity severity = Severity::Error;
};

namespace detail {

inline void validate_channels(Field field, Eigen::Index N, const std::vector<Channel>& channels,
                              std::vector<Violation>& out) {
  if (channels.size() < 2)
    out.push_back({"M_TOO_SMALL", "fewer than two users", Severity::Assumption});
  if (N < 2) out.push_back({"N_TOO_SMALL", "dimension below two", Severity::Assumption});
  if (N < 1) out.push_back({"N_INVALID", "dimension must be positive", Severity::Error});
  if (channels.empty()) out.push_back({"NO_USERS", "instance has no channels", Severity::Error});
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& h = channels[i].entries;
    const std::string tag = "channel " + std::to_string(i);
    if (h.size() != N) {
      out.push_back({"CHANNEL_LENGTH_MISMATCH", tag + " has length " + std::to_string(h.size())});
      continue;
    }
    if (!h.allFinite()) out.push_back({"NON_FINITE", tag + " has non-finite entries"});
    if (h.squaredNorm() == 0.0) out.push_back({"ZERO_CHANNEL", tag + " is zero"});
    if (field == Field::Real && h.imag().cwiseAbs().maxCoeff() != 0.0)
      out.push_back({"IMAGINARY_IN_REAL_FIELD", tag + " has imaginary parts"});
  }
}

}  // namespace detail

/// Every invariant violation of the instance; empty means valid.
inline std::vector<Violation> validate_instance(const InstanceP1& inst) {
  std::vector<Violation> out;
  detail::validate_channels(inst.field, inst.N, inst.channels, out);
  return out;
}

inline std::vector<Violation> validate_instance(const InstanceP2& inst) {
  std::vector<Violation> out;
  detail::validate_channels(inst.field, inst.N, inst.channels, out);
  if (inst.Q < 1) out.push_back({"Q_TOO_SMALL", "slot count must be at least one"});
  if (inst.priorities.size() != inst.channels.size()) {
    out.push_back({"PRIORITY_COUNT_MISMATCH", "need one priority per user"});
    return out;
  }
  for (std::size_t i = 0; i < inst.priorities.size(); ++i) {
    if (inst.priorities[i] < 1)
      out.push_back({"PRIORITY_BELOW_ONE", "P_" + std::to_string(i) + " < 1"});
    else if (inst.priorities[i] > inst.Q)
      out.push_back({"PRIORITY_EXCEEDS_SLOTS", "P_" + std::to_string(i) + " > Q"});
  }
  return out;
}

inline bool has_errors(const std::vector<Violation>& v) {
  for (const auto& x : v)
    if (x.severity == Severity::Error) return true;
  return false;
}

template <typename Instance>
void require_valid(const Instance& inst) {
  const auto v = validate_instance(inst);
  std::string msg;
  for (const auto& x : v)
    if (x.severity == Severity::Error) msg += (msg.empty() ? "" : "; ") + x.code + " (" + x.message + ")";
  if (!msg.empty()) throw Error(ErrorCode::InvalidInput, msg);
}

/// Q-slot view of a two-slot instance: P_i = 1 and Q = 2.
inline InstanceP2 as_two_slot_p2(const InstanceP1& inst) {
  return {inst.field, inst.N, inst.channels, 2, std::vector<int>(inst.M(), 1)};
}

struct RelaxationSolution {
  std::vector<Eigen::MatrixXcd> X_blocks;  // one N x N block per slot
  Eigen::MatrixXd alpha;                   // M x Q; for the two-slot model column 1 is 1 - alpha
  double objective = 0.0;                  // sum_q trace X^(q)
  double duality_gap = 0.0;

  Eigen::Index slots() const { return static_cast<Eigen::Index>(X_blocks.size()); }
};

struct RoundedSolution {
  Eigen::MatrixXi beta;                   // M x Q binary assignment
  std::vector<Eigen::VectorXcd> w_blocks; // one beamformer per slot
  double objective = 0.0;
  std::size_t trials_used = 0;
  bool success = false;                   // some trial produced a feasible point
  std::size_t success_events = 0;         // trials meeting the probabilistic certificate
  std::size_t degenerate_trials = 0;
};

/// |h^H w|^2, i.e. w^H H w for H = h h^H.
inline double received_power(const Channel& h, const Eigen::VectorXcd& w) {
  return std::norm(h.entries.dot(w));
}

/// Largest shortfall of an assigned constraint below its unit target
/// (0 if all active constraints hold).
inline double max_constraint_shortfall(const std::vector<Channel>& channels,
                                       const Eigen::MatrixXi& beta,
                                       const std::vector<Eigen::VectorXcd>& w_blocks) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < beta.rows(); ++i)
    for (Eigen::Index q = 0; q < beta.cols(); ++q)
      if (beta(i, q) == 1)
        worst = std::max(worst, 1.0 - received_power(channels[static_cast<std::size_t>(i)],
                                                     w_blocks[static_cast<std::size_t>(q)]));
  return worst;
}

/// Feasibility of a rounded point for the Q-slot model; P1 instances use
/// P_i = 1 via as_two_slot_p2 plus the one-slot-each column structure.
inline bool is_feasible(const InstanceP2& inst, const RoundedSolution& sol,
                        double tol = kFeasibilityTol) {
  const auto M = static_cast<Eigen::Index>(inst.M());
  if (sol.beta.rows() != M || sol.beta.cols() != inst.Q) return false;
  if (static_cast<int>(sol.w_blocks.size()) != inst.Q) return false;
  for (Eigen::Index i = 0; i < M; ++i) {
    int count = 0;
    for (Eigen::Index q = 0; q < inst.Q; ++q) {
      if (sol.beta(i, q) != 0 && sol.beta(i, q) != 1) return false;
      count += sol.beta(i, q);
    }
    if (count < inst.priorities[static_cast<std::size_t>(i)]) return false;
  }
  return max_constraint_shortfall(inst.channels, sol.beta, sol.w_blocks) <= tol;
}

inline bool is_feasible(const InstanceP1& inst, const RoundedSolution& sol,
                        double tol = kFeasibilityTol) {
  if (sol.beta.cols() != 2) return false;
  for (Eigen::Index i = 0; i < sol.beta.rows(); ++i)
    if (sol.beta(i, 0) + sol.beta(i, 1) != 1) return false;
  return is_feasible(as_two_slot_p2(inst), sol, tol);
}

}  // namespace mbqcqp
