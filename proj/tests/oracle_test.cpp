#include <gtest/gtest.h>

#include <random>

#include "mbqcqp/oracle.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/rounding.hpp"
#include "test_support.hpp"

using namespace mbqcqp;
namespace ts = testing_support;

namespace {

void expect_upper_attained(const std::vector<Channel>& channels, const OracleBracket& b) {
  double obj = 0.0;
  for (const auto& w : b.upper_w) obj += w.squaredNorm();
  EXPECT_NEAR(obj, b.upper, 1e-9 * (1.0 + b.upper));
  EXPECT_LE(max_constraint_shortfall(channels, b.argmin_beta, b.upper_w), 1e-7);
}

}  // namespace

TEST(ClosedForm, Examples) {
  EXPECT_DOUBLE_EQ(*closed_form_subproblem({{(Eigen::VectorXcd(2) << 2.0, 0.0).finished()}}), 0.25);
  EXPECT_DOUBLE_EQ(*closed_form_subproblem(ts::orthogonal_channels(2, 2, {1.0, 2.0})), 1.25);
  EXPECT_EQ(*closed_form_subproblem({}), 0.0);
  const Channel a{(Eigen::VectorXcd(2) << 1.0, 0.0).finished()};
  const Channel b{(Eigen::VectorXcd(2) << 1.0, 1.0).finished()};
  EXPECT_FALSE(closed_form_subproblem({a, b}).has_value());
}

TEST(ClosedForm, AgreesWithRelaxationOnOrthogonalGroups) {
  for (std::size_t M = 1; M <= 3; ++M) {
    std::vector<double> norms;
    for (std::size_t i = 0; i < M; ++i) norms.push_back(0.6 + 0.5 * i);
    const auto chans = ts::orthogonal_channels(M, 3, norms);
    InstanceP2 inst{Field::Real, 3, chans, 1, std::vector<int>(M, 1)};
    EXPECT_NEAR(solve_relaxation(inst).objective, *closed_form_subproblem(chans), 1e-5);
  }
}

TEST(EnumerateP1, SingleUser) {
  InstanceP1 inst{Field::Real, 2, ts::orthogonal_channels(1, 2, {1.0})};
  const auto b = enumerate_p1(inst);
  EXPECT_TRUE(b.certified);
  EXPECT_NEAR(b.lower, 1.0, 1e-9);
  EXPECT_NEAR(b.upper, 1.0, 1e-9);
  EXPECT_EQ(b.assignments, 2u);
}

TEST(EnumerateP1, OrthonormalPairCostsTwo) {
  // Whatever the split, each user costs 1 in its own slot.
  InstanceP1 inst{Field::Real, 2, ts::orthogonal_channels(2, 2, {1.0, 1.0})};
  const auto b = enumerate_p1(inst);
  EXPECT_TRUE(b.certified);
  EXPECT_NEAR(b.lower, 2.0, 1e-9);
  EXPECT_NEAR(b.upper, 2.0, 1e-9);
  EXPECT_EQ(b.assignments, 4u);
  expect_upper_attained(inst.channels, b);
}

TEST(EnumerateP1, BracketsRelaxationAndRounding) {
  std::mt19937_64 g(1);
  for (int k = 0; k < 12; ++k) {
    const Field f = k % 2 ? Field::Real : Field::Complex;
    const auto inst = ts::random_p1(g, 2 + k % 3, 2 + k % 3, f);
    const auto b = enumerate_p1(inst);
    EXPECT_LE(b.lower, b.upper + 1e-9);
    const auto relax = solve_relaxation(inst);
    EXPECT_LE(relax.objective, b.lower + 1e-6);
    EXPECT_GE(round_p1(inst, relax, 500, k).objective, b.lower - 1e-6);
    expect_upper_attained(inst.channels, b);
    for (Eigen::Index i = 0; i < b.argmin_beta.rows(); ++i) EXPECT_EQ(b.argmin_beta.row(i).sum(), 1);
  }
}

TEST(EnumerateP1, TooManyUsers) {
  std::mt19937_64 g(2);
  try {
    enumerate_p1(ts::random_p1(g, 13, 2, Field::Real));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnumerationTooLarge);
  }
}

TEST(EnumerateP2, SingleUserFullPriority) {
  std::mt19937_64 g(3);
  const auto h = ts::random_channel(g, 3, Field::Complex);
  InstanceP2 inst{Field::Complex, 3, {h}, 3, {3}};
  const auto b = enumerate_p2(inst);
  EXPECT_EQ(b.assignments, 1u);
  EXPECT_NEAR(b.lower, 3.0 / h.norm2(), 1e-9);
  EXPECT_NEAR(b.upper, 3.0 / h.norm2(), 1e-9);
}

TEST(EnumerateP2, TwoSlotsMatchP1) {
  std::mt19937_64 g(4);
  for (int k = 0; k < 6; ++k) {
    const auto inst = ts::random_p1(g, 2 + k % 3, 3, k % 2 ? Field::Real : Field::Complex);
    OracleOptions opt;
    opt.seed = 5;
    const auto a = enumerate_p1(inst, opt), b = enumerate_p2(as_two_slot_p2(inst), opt);
    EXPECT_NEAR(a.lower, b.lower, 1e-6);
    EXPECT_NEAR(a.upper, b.upper, 1e-6);
  }
}

TEST(EnumerateP2, BracketsRelaxation) {
  std::mt19937_64 g(5);
  for (int k = 0; k < 6; ++k) {
    const auto inst = ts::random_p2(g, 3, 3, 3, k % 2 ? Field::Real : Field::Complex);
    const auto b = enumerate_p2(inst);
    EXPECT_LE(solve_relaxation(inst).objective, b.lower + 1e-6);
    expect_upper_attained(inst.channels, b);
    for (Eigen::Index i = 0; i < b.argmin_beta.rows(); ++i)
      EXPECT_EQ(b.argmin_beta.row(i).sum(), inst.priorities[static_cast<std::size_t>(i)]);
  }
}

TEST(EnumerateP2, CapEnforced) {
  std::mt19937_64 g(6);
  auto inst = ts::random_p2(g, 12, 2, 4, Field::Real);
  inst.priorities.assign(12, 2);  // 6^12 minimal assignments
  EXPECT_THROW(enumerate_p2(inst), Error);
}

TEST(Oracle, ThreadCountDoesNotMatter) {
  std::mt19937_64 g(7);
  const auto inst = ts::random_p2(g, 4, 3, 3, Field::Complex);
  OracleOptions one, many;
  many.threads = 4;
  const auto a = enumerate_p2(inst, one), b = enumerate_p2(inst, many);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  EXPECT_EQ(a.argmin_beta, b.argmin_beta);
}
