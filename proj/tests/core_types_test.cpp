#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "mbqcqp/core_types.hpp"
#include "test_support.hpp"

using namespace mbqcqp;
namespace ts = testing_support;

TEST(OuterProduct, RealExample) {
  Eigen::VectorXcd h(2);
  h << 1.0, 2.0;
  const auto H = outer_product({h});
  Eigen::MatrixXcd want(2, 2);
  want << 1.0, 2.0, 2.0, 4.0;
  EXPECT_LE((H.matrix - want).norm(), 1e-15);
}

TEST(OuterProduct, ComplexExampleIsHermitian) {
  Eigen::VectorXcd h(2);
  h << cplx(1.0, 1.0), cplx(0.0, -2.0);
  const auto H = outer_product({h});
  EXPECT_NEAR(H.matrix(0, 0).real(), 2.0, 1e-15);
  EXPECT_NEAR(H.matrix(1, 1).real(), 4.0, 1e-15);
  EXPECT_LE(std::abs(H.matrix(0, 1) - cplx(-2.0, 2.0)), 1e-15);
  EXPECT_LE((H.matrix - H.matrix.adjoint()).norm(), 1e-15);
}

TEST(OuterProduct, PhaseInvariant) {
  std::mt19937_64 g(1);
  for (int k = 0; k < 100; ++k) {
    const auto h = ts::random_channel(g, 4, Field::Complex);
    const cplx phase = std::polar(1.0, 0.37 * k);
    Channel rotated{h.entries * phase};
    EXPECT_LE((outer_product(h).matrix - outer_product(rotated).matrix).norm(), 1e-12);
  }
}

TEST(OuterProduct, TraceIsSquaredNorm) {
  std::mt19937_64 g(2);
  for (int k = 0; k < 1000; ++k) {
    const auto h = ts::random_channel(g, 1 + k % 8, k % 2 ? Field::Real : Field::Complex);
    const auto H = outer_product(h);
    EXPECT_NEAR(H.matrix.trace().real(), h.norm2(), 1e-12 * (1.0 + h.norm2()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * (1.0 + h.norm2()));
  }
}

TEST(OuterProduct, ZeroChannelThrows) {
  try {
    outer_product({Eigen::VectorXcd::Zero(3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroChannel);
  }
}

namespace {
bool has_code(const std::vector<Violation>& v, const std::string& code) {
  for (const auto& x : v)
    if (x.code == code) return true;
  return false;
}
}  // namespace

TEST(Validation, ValidInstanceHasNoViolations) {
  std::mt19937_64 g(3);
  EXPECT_TRUE(validate_instance(ts::random_p1(g, 3, 2, Field::Real)).empty());
  EXPECT_TRUE(validate_instance(ts::random_p2(g, 3, 2, 3, Field::Complex)).empty());
}

TEST(Validation, ReportsEachProblem) {
  InstanceP1 inst{Field::Real, 2, {}};
  Eigen::VectorXcd a(2), b(3), c(2), d(2);
  a << cplx(1.0, 0.5), 0.0;
  b << 1.0, 1.0, 1.0;
  c << 0.0, 0.0;
  d << std::numeric_limits<double>::quiet_NaN(), 1.0;
  inst.channels = {{a}, {b}, {c}, {d}};
  const auto v = validate_instance(inst);
  EXPECT_TRUE(has_code(v, "IMAGINARY_IN_REAL_FIELD"));
  EXPECT_TRUE(has_code(v, "CHANNEL_LENGTH_MISMATCH"));
  EXPECT_TRUE(has_code(v, "ZERO_CHANNEL"));
  EXPECT_TRUE(has_code(v, "NON_FINITE"));
  EXPECT_TRUE(has_errors(v));
  EXPECT_THROW(require_valid(inst), Error);
}

TEST(Validation, SmallSizesAreAssumptionsOnly) {
  InstanceP1 inst{Field::Real, 1, {{Eigen::VectorXcd::Ones(1)}}};
  const auto v = validate_instance(inst);
  EXPECT_TRUE(has_code(v, "M_TOO_SMALL"));
  EXPECT_TRUE(has_code(v, "N_TOO_SMALL"));
  EXPECT_FALSE(has_errors(v));
  EXPECT_NO_THROW(require_valid(inst));
}

TEST(Validation, PriorityRules) {
  std::mt19937_64 g(4);
  auto inst = ts::random_p2(g, 3, 2, 2, Field::Real);
  inst.priorities = {0, 3, 1};
  const auto v = validate_instance(inst);
  EXPECT_TRUE(has_code(v, "PRIORITY_BELOW_ONE"));
  EXPECT_TRUE(has_code(v, "PRIORITY_EXCEEDS_SLOTS"));
  inst.priorities = {1, 1};
  EXPECT_TRUE(has_code(validate_instance(inst), "PRIORITY_COUNT_MISMATCH"));
  inst.priorities = {1, 1, 1};
  inst.Q = 0;
  EXPECT_TRUE(has_code(validate_instance(inst), "Q_TOO_SMALL"));
}

TEST(Feasibility, ShortfallAndCheck) {
  InstanceP1 inst{Field::Real, 2, ts::orthogonal_channels(2, 2, {1.0, 2.0})};
  RoundedSolution s;
  s.beta.resize(2, 2);
  s.beta << 1, 0, 0, 1;
  Eigen::VectorXcd w0(2), w1(2);
  w0 << 1.0, 0.0;
  w1 << 0.0, 0.5;
  s.w_blocks = {w0, w1};
  EXPECT_NEAR(max_constraint_shortfall(inst.channels, s.beta, s.w_blocks), 0.0, 1e-15);
  EXPECT_TRUE(is_feasible(inst, s));
  s.w_blocks[1] *= 0.5;
  EXPECT_NEAR(max_constraint_shortfall(inst.channels, s.beta, s.w_blocks), 0.75, 1e-15);
  EXPECT_FALSE(is_feasible(inst, s));
}

TEST(Feasibility, TwoSlotView) {
  std::mt19937_64 g(5);
  const auto p1 = ts::random_p1(g, 4, 3, Field::Complex);
  const auto p2 = as_two_slot_p2(p1);
  EXPECT_EQ(p2.Q, 2);
  EXPECT_EQ(p2.priorities, std::vector<int>(4, 1));
  EXPECT_EQ(p2.channels.size(), 4u);
}
