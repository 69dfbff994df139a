#pragma once

// Standard-form conic problem used by both relaxations:
//
//   min   sum_b Re tr[C_b X_b] + c^T s
//   s.t.  sum_b Re tr[A_jb X_b] + g_j^T s >= r_j     (j = 1..m)
//         lo <= s <= hi
//         X_b PSD
//
// Scalar is double (real symmetric blocks) or std::complex<double>
// (Hermitian blocks). The solver consumes the real form only; complex
// problems go through embed_complex.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "mbqcqp/core_types.hpp"

namespace mbqcqp {

struct ScalarBounds {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

template <typename Scalar>
struct BlockTerm {
  int block = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coeff;
};

struct ScalarTerm {
  int index = 0;
  double coeff = 0.0;
};

template <typename Scalar>
struct LinearConstraint {
  std::vector<BlockTerm<Scalar>> blocks;
  std::vector<ScalarTerm> scalars;
  double rhs = 0.0;
};

template <typename Scalar>
struct SdpProblem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::vector<int> block_dims;
  std::vector<Matrix> objective_blocks;  // C_b, same shape as the block
  std::vector<ScalarBounds> scalar_bounds;
  Eigen::VectorXd objective_scalars;     // c, one per scalar
  std::vector<LinearConstraint<Scalar>> constraints;

  int add_block(int dim, Matrix objective) {
    block_dims.push_back(dim);
    objective_blocks.push_back(std::move(objective));
    return static_cast<int>(block_dims.size()) - 1;
  }

  int add_scalar(ScalarBounds bounds, double cost = 0.0) {
    scalar_bounds.push_back(bounds);
    objective_scalars.conservativeResize(objective_scalars.size() + 1);
    objective_scalars(objective_scalars.size() - 1) = cost;
    return static_cast<int>(scalar_bounds.size()) - 1;
  }

  int num_scalars() const { return static_cast<int>(scalar_bounds.size()); }
  int num_blocks() const { return static_cast<int>(block_dims.size()); }
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

struct SdpSolution {
  std::vector<Eigen::MatrixXd> X_blocks;
  Eigen::VectorXd s;
  Eigen::VectorXd y;  // multipliers of the >= rows, then the finite upper bounds
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // |primal - dual| / (1 + |primal|)
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double max_violation = 0.0;  // worst absolute shortfall of a constraint or bound
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  std::string diagnostics;
};

namespace detail {

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& A, double tol = kStructuralTol) {
  if (A.rows() != A.cols()) return false;
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace detail

/// Structural problems with the model; empty means well-formed.
template <typename Scalar>
std::vector<std::string> check_problem(const SdpProblem<Scalar>& p) {
  std::vector<std::string> errs;
  if (p.block_dims.empty()) errs.push_back("no PSD blocks");
  if (p.objective_blocks.size() != p.block_dims.size()) errs.push_back("objective block count mismatch");
  if (p.objective_scalars.size() != p.num_scalars()) errs.push_back("scalar objective size mismatch");
  for (std::size_t b = 0; b < p.block_dims.size() && b < p.objective_blocks.size(); ++b) {
    const auto& C = p.objective_blocks[b];
    if (p.block_dims[b] < 1 || C.rows() != p.block_dims[b] || C.cols() != p.block_dims[b])
      errs.push_back("objective block " + std::to_string(b) + " has wrong shape");
    else if (!detail::is_hermitian(C))
      errs.push_back("objective block " + std::to_string(b) + " not Hermitian");
  }
  for (int k = 0; k < p.num_scalars(); ++k) {
    const auto& bd = p.scalar_bounds[static_cast<std::size_t>(k)];
    if (!std::isfinite(bd.lo) || std::isnan(bd.hi) || bd.lo > bd.hi)
      errs.push_back("scalar " + std::to_string(k) + " has invalid bounds");
  }
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    const std::string tag = "constraint " + std::to_string(j);
    for (const auto& t : c.blocks) {
      if (t.block < 0 || t.block >= p.num_blocks()) {
        errs.push_back(tag + " refers to a missing block");
        continue;
      }
      const int n = p.block_dims[static_cast<std::size_t>(t.block)];
      if (t.coeff.rows() != n || t.coeff.cols() != n)
        errs.push_back(tag + " has a wrong-shaped coefficient");
      else if (!detail::is_hermitian(t.coeff))
        errs.push_back(tag + " coefficient not Hermitian");
    }
    for (const auto& t : c.scalars)
      if (t.index < 0 || t.index >= p.num_scalars()) errs.push_back(tag + " refers to a missing scalar");
    if (!std::isfinite(c.rhs)) errs.push_back(tag + " has a non-finite right-hand side");
  }
  return errs;
}

/// [[Re A, -Im A], [Im A, Re A]]: the real symmetric image of a Hermitian A.
inline Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& A) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = A.real();
  R.topRightCorner(n, n) = -A.imag();
  R.bottomLeftCorner(n, n) = A.imag();
  R.bottomRightCorner(n, n) = A.real();
  return R;
}

/// Inverse of the embedding for a (not necessarily structured) 2n x 2n PSD
/// matrix: X = (X11 + X22)/2 + i (X21 - X12)/2.
inline Eigen::MatrixXcd back_map(const Eigen::MatrixXd& Xt) {
  const Eigen::Index n = Xt.rows() / 2;
  Eigen::MatrixXcd X(n, n);
  X.real() = 0.5 * (Xt.topLeftCorner(n, n) + Xt.bottomRightCorner(n, n));
  X.imag() = 0.5 * (Xt.bottomLeftCorner(n, n) - Xt.topRightCorner(n, n));
  return X;
}

/// Real symmetric problem with the same optimal value. Coefficients are
/// halved so that tr[(A~/2) X~] = Re tr[A X] when X~ embeds X.
inline SdpProblem<double> embed_complex(const SdpProblem<cplx>& p) {
  for (const auto& e : check_problem(p))
    if (e.find("Hermitian") != std::string::npos) throw Error(ErrorCode::NonHermitian, e);
  SdpProblem<double> out;
  for (int b = 0; b < p.num_blocks(); ++b)
    out.add_block(2 * p.block_dims[static_cast<std::size_t>(b)],
                  0.5 * embed_hermitian(p.objective_blocks[static_cast<std::size_t>(b)]));
  out.scalar_bounds = p.scalar_bounds;
  out.objective_scalars = p.objective_scalars;
  out.constraints.reserve(p.constraints.size());
  for (const auto& c : p.constraints) {
    LinearConstraint<double> rc;
    rc.scalars = c.scalars;
    rc.rhs = c.rhs;
    for (const auto& t : c.blocks) rc.blocks.push_back({t.block, 0.5 * embed_hermitian(t.coeff)});
    out.constraints.push_back(std::move(rc));
  }
  return out;
}

/// Real-field problem stored with complex coefficients; imaginary parts
/// must vanish exactly.
inline SdpProblem<double> to_real_problem(const SdpProblem<cplx>& p) {
  auto take_real = [](const Eigen::MatrixXcd& A) {
    if (A.size() > 0 && A.imag().cwiseAbs().maxCoeff() != 0.0)
      throw Error(ErrorCode::InvalidInput, "real-field problem has imaginary coefficients");
    return Eigen::MatrixXd(A.real());
  };
  SdpProblem<double> out;
  for (int b = 0; b < p.num_blocks(); ++b)
    out.add_block(p.block_dims[static_cast<std::size_t>(b)],
                  take_real(p.objective_blocks[static_cast<std::size_t>(b)]));
  out.scalar_bounds = p.scalar_bounds;
  out.objective_scalars = p.objective_scalars;
  for (const auto& c : p.constraints) {
    LinearConstraint<double> rc;
    rc.scalars = c.scalars;
    rc.rhs = c.rhs;
    for (const auto& t : c.blocks) rc.blocks.push_back({t.block, take_real(t.coeff)});
    out.constraints.push_back(std::move(rc));
  }
  return out;
}

/// Left-hand side sum_b Re tr[A_jb X_b] + g_j^T s of one constraint.
template <typename Scalar, typename BlockMatrix>
double constraint_lhs(const LinearConstraint<Scalar>& c, const std::vector<BlockMatrix>& X,
                      const Eigen::VectorXd& s) {
  double v = 0.0;
  for (const auto& t : c.blocks) {
    // Re tr[A X] = Re sum_kl conj(A_kl) X_kl for Hermitian A.
    v += std::real(t.coeff.conjugate().cwiseProduct(X[static_cast<std::size_t>(t.block)]).sum());
  }
  for (const auto& t : c.scalars) v += t.coeff * s(t.index);
  return v;
}

/// Worst absolute violation of constraints and bounds at (X, s).
template <typename Scalar, typename BlockMatrix>
double max_violation(const SdpProblem<Scalar>& p, const std::vector<BlockMatrix>& X,
                     const Eigen::VectorXd& s) {
  double worst = 0.0;
  for (const auto& c : p.constraints) worst = std::max(worst, c.rhs - constraint_lhs(c, X, s));
  for (int k = 0; k < p.num_scalars(); ++k) {
    const auto& bd = p.scalar_bounds[static_cast<std::size_t>(k)];
    worst = std::max({worst, bd.lo - s(k), s(k) - bd.hi});
  }
  return worst;
}

// Debug dump. Field names:
//   {"blocks":[n,...], "objective":{"blocks":[M,...], "scalars":[c,...]},
//    "scalars":[{"lo":x,"hi":x|null},...],
//    "constraints":[{"blocks":[{"block":b,"coeff":M}], "scalars":[{"index":k,"coeff":x}], "rhs":r}]}
// where a real matrix M is a row-major list of rows.
inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& A) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const SdpProblem<double>& p) {
  nlohmann::json j;
  j["blocks"] = p.block_dims;
  nlohmann::json obj_blocks = nlohmann::json::array();
  for (const auto& C : p.objective_blocks) obj_blocks.push_back(matrix_to_json(C));
  j["objective"]["blocks"] = std::move(obj_blocks);
  j["objective"]["scalars"] = std::vector<double>(p.objective_scalars.data(),
                                                  p.objective_scalars.data() + p.objective_scalars.size());
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : p.scalar_bounds)
    bounds.push_back({{"lo", b.lo}, {"hi", std::isfinite(b.hi) ? nlohmann::json(b.hi) : nlohmann::json()}});
  j["scalars"] = std::move(bounds);
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : p.constraints) {
    nlohmann::json jc;
    jc["blocks"] = nlohmann::json::array();
    for (const auto& t : c.blocks) jc["blocks"].push_back({{"block", t.block}, {"coeff", matrix_to_json(t.coeff)}});
    jc["scalars"] = nlohmann::json::array();
    for (const auto& t : c.scalars) jc["scalars"].push_back({{"index", t.index}, {"coeff", t.coeff}});
    jc["rhs"] = c.rhs;
    cons.push_back(std::move(jc));
  }
  j["constraints"] = std::move(cons);
  return j;
}

}  // namespace mbqcqp
