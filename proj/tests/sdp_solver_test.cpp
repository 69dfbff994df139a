#include <gtest/gtest.h>

#include <random>

#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/sdp_solver.hpp"
#include "test_support.hpp"

using namespace mbqcqp;
namespace ts = testing_support;

namespace {

SdpProblem<double> one_by_one(double rhs) {
  SdpProblem<double> p;
  p.add_block(1, Eigen::MatrixXd::Ones(1, 1));
  p.constraints.push_back({{{0, Eigen::MatrixXd::Ones(1, 1)}}, {}, rhs});
  return p;
}

void expect_weak_duality(const SdpSolution& s) {
  EXPECT_LE(s.dual_objective, s.primal_objective + 1e-9);
}

}  // namespace

TEST(Solver, OneByOne) {
  const auto s = solve(one_by_one(1.0));
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_objective, 1.0, 1e-7);
  EXPECT_NEAR(s.X_blocks[0](0, 0), 1.0, 1e-7);
  expect_weak_duality(s);
}

TEST(Solver, InfeasibleIsNotOptimal) {
  SdpProblem<double> p;
  p.add_block(1, Eigen::MatrixXd::Ones(1, 1));
  p.constraints.push_back({{{0, -Eigen::MatrixXd::Ones(1, 1)}}, {}, 1.0});
  EXPECT_NE(solve(p).status, SolveStatus::Optimal);
}

TEST(Solver, RejectsMalformedProblem) {
  SdpProblem<double> p;
  EXPECT_THROW(solve(p), Error);
  p.add_block(2, Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 2.0, 0.0, 1.0;
  p.constraints.push_back({{{0, A}}, {}, 1.0});
  EXPECT_THROW(solve(p), Error);
}

TEST(Solver, OffDiagonalCoupling) {
  // min tr X s.t. X_01 + X_10 >= 2: optimum X = [[1,1],[1,1]], value 2.
  SdpProblem<double> p;
  p.add_block(2, Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, 1.0, 0.0;
  p.constraints.push_back({{{0, A}}, {}, 2.0});
  const auto s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_objective, 2.0, 1e-6);
  expect_weak_duality(s);
}

TEST(Solver, DiagonalProblemsMatchLpReference) {
  std::mt19937_64 g(17);
  for (int k = 0; k < 200; ++k) {
    const auto dc = ts::random_diagonal_case(g);
    const double ref = ts::lp_vertex_min(dc.c, dc.G, dc.h);
    const auto s = solve(dc.sdp);
    ASSERT_EQ(s.status, SolveStatus::Optimal) << "case " << k << ": " << s.diagnostics;
    EXPECT_NEAR(s.primal_objective, ref, 1e-6) << "case " << k;
    expect_weak_duality(s);
  }
}

TEST(Solver, AddingConstraintNeverLowersOptimum) {
  std::mt19937_64 g(23);
  for (int k = 0; k < 50; ++k) {
    auto dc = ts::random_diagonal_case(g);
    const auto base = solve(dc.sdp);
    auto more = dc.sdp;
    more.constraints.push_back(dc.sdp.constraints.front());
    more.constraints.back().rhs += 0.3;
    const auto tighter = solve(more);
    ASSERT_EQ(base.status, SolveStatus::Optimal);
    ASSERT_EQ(tighter.status, SolveStatus::Optimal);
    EXPECT_GE(tighter.primal_objective, base.primal_objective - 1e-6);
  }
}

TEST(Solver, ScalingTheRightHandSideScalesTheOptimum) {
  std::mt19937_64 g(29);
  for (int k = 0; k < 30; ++k) {
    const auto inst = ts::random_p1(g, 3, 3, Field::Real);
    // Channel constraints only, so the problem is homogeneous in the rhs.
    SdpProblem<double> h;
    h.add_block(3, Eigen::MatrixXd::Identity(3, 3));
    for (std::size_t i = 0; i < inst.M(); ++i)
      h.constraints.push_back({{{0, outer_product(inst.channels[i]).matrix.real()}}, {}, 1.0});
    auto h3 = h;
    for (auto& c : h3.constraints) c.rhs = 3.0;
    const auto a = solve(h), b = solve(h3);
    ASSERT_EQ(a.status, SolveStatus::Optimal);
    ASSERT_EQ(b.status, SolveStatus::Optimal);
    EXPECT_NEAR(b.primal_objective, 3.0 * a.primal_objective, 1e-6 * (1.0 + b.primal_objective));
  }
}

TEST(Embedding, HermitianExample) {
  Eigen::MatrixXcd A(2, 2);
  A << 1.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 1.0;
  const Eigen::MatrixXd R = embed_hermitian(A);
  ASSERT_EQ(R.rows(), 4);
  Eigen::RowVectorXd row0(4);
  row0 << 1.0, 0.0, 0.0, 1.0;
  EXPECT_LE((R.row(0) - row0).norm(), 1e-15);
  EXPECT_LE((R - R.transpose()).norm(), 1e-15);
}

TEST(Embedding, IdentityAndObjectivePreserved) {
  SdpProblem<cplx> p;
  p.add_block(3, Eigen::MatrixXcd::Identity(3, 3));
  p.constraints.push_back({{{0, Eigen::MatrixXcd::Identity(3, 3)}}, {}, 2.0});
  const auto r = embed_complex(p);
  EXPECT_LE((r.objective_blocks[0] - 0.5 * Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-15);
  const auto s = solve(r);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(back_map(s.X_blocks[0]).trace().real(), 2.0, 1e-7);
  EXPECT_NEAR(s.primal_objective, 2.0, 1e-7);
}

TEST(Embedding, NonHermitianThrows) {
  SdpProblem<cplx> p;
  Eigen::MatrixXcd C(2, 2);
  C << 1.0, cplx(0.0, 1.0), cplx(0.0, 1.0), 1.0;
  p.add_block(2, C);
  EXPECT_THROW(embed_complex(p), Error);
}

TEST(Embedding, RoundTripOnComplexRelaxations) {
  std::mt19937_64 g(31);
  for (int k = 0; k < 40; ++k) {
    const auto inst = ts::random_p1(g, 2 + k % 5, 2 + k % 4, Field::Complex);
    const auto p = build_sdp1(inst);
    const auto s = solve(prepare_for_solver(p, Field::Complex));
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    expect_weak_duality(s);
    std::vector<Eigen::MatrixXcd> X;
    for (const auto& Xt : s.X_blocks) X.push_back(back_map(Xt));
    double obj = 0.0;
    for (const auto& B : X) {
      obj += B.trace().real();
      EXPECT_LE((B - B.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    }
    EXPECT_NEAR(obj, s.primal_objective, 1e-7);
    EXPECT_LE(max_violation(p, X, s.s), 1e-7);
  }
}
