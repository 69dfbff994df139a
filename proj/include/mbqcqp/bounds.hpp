#pragma once

// Approximation constants for randomized rounding of the two relaxations.
// mu is the guaranteed ratio v(rounded) <= mu * v(relaxation); a single trial
// certifies it with probability at least sigma.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mbqcqp/core_types.hpp"

namespace mbqcqp {

struct BoundReport {
  double mu = 0.0;
  double alpha_thresh = 0.0;  // mu = 3 * alpha_thresh
  double sigma = 0.0;
  Model model = Model::P1;
  Field field = Field::Real;
};

/// Per-trial success probability (2 - sqrt(pi)) / 3.
inline double success_probability() { return (2.0 - std::sqrt(std::numbers::pi)) / 3.0; }

/// Two-slot model: alpha = 18 M^2 / pi (real) or 8 M / sqrt(pi) (complex).
/// M = 1 is accepted even though the guarantee is stated for M >= 2.
inline BoundReport mu_p1(std::size_t M, Field field) {
  if (M == 0) throw Error(ErrorCode::InvalidInput, "bound needs at least one user");
  const double m = static_cast<double>(M);
  BoundReport r;
  r.model = Model::P1;
  r.field = field;
  r.alpha_thresh = field == Field::Real ? 18.0 * m * m / std::numbers::pi : 8.0 * m / std::sqrt(std::numbers::pi);
  r.mu = 3.0 * r.alpha_thresh;
  r.sigma = success_probability();
  return r;
}

/// Q-slot model: alpha = 9 (sum_i P_i sqrt(Q - P_i + 1))^2 / pi (real) or
/// 4 sum_i P_i (Q - P_i + 1) / sqrt(pi) (complex).
inline BoundReport mu_p2(const std::vector<int>& P, int Q, Field field) {
  if (P.empty()) throw Error(ErrorCode::InvalidInput, "bound needs at least one user");
  double s = 0.0;
  for (int p : P) {
    if (p < 1 || p > Q)
      throw Error(ErrorCode::InvalidInput, "priority " + std::to_string(p) + " outside [1, " + std::to_string(Q) + "]");
    const double slack = static_cast<double>(Q - p + 1);
    s += field == Field::Real ? p * std::sqrt(slack) : p * slack;
  }
  BoundReport r;
  r.model = Model::P2;
  r.field = field;
  r.alpha_thresh = field == Field::Real ? 9.0 * s * s / std::numbers::pi : 4.0 * s / std::sqrt(std::numbers::pi);
  r.mu = 3.0 * r.alpha_thresh;
  r.sigma = success_probability();
  return r;
}

struct RatioCheck {
  double ratio = 0.0;
  bool satisfied = false;
};

inline RatioCheck check_ratio(double rounded_objective, double relax_objective, const BoundReport& report) {
  if (!(relax_objective > 0.0))
    throw Error(ErrorCode::InvalidInput, "relaxation objective must be positive");
  RatioCheck c;
  c.ratio = rounded_objective / relax_objective;
  c.satisfied = c.ratio <= report.mu * (1.0 + 1e-9);
  return c;
}

}  // namespace mbqcqp
