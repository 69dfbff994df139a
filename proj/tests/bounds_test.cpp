#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mbqcqp/bounds.hpp"

using namespace mbqcqp;

namespace {
const double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(std::numbers::pi);
}  // namespace

TEST(Bounds, TwoSlotClosedForms) {
  EXPECT_NEAR(mu_p1(5, Field::Real).mu, 54.0 * 25.0 / kPi, 1e-12 * 430.0);
  EXPECT_NEAR(mu_p1(5, Field::Complex).mu, 120.0 / kSqrtPi, 1e-12 * 70.0);
  EXPECT_NEAR(mu_p1(1, Field::Real).mu, 54.0 / kPi, 1e-12 * 20.0);
}

TEST(Bounds, QSlotReductions) {
  for (std::size_t M = 1; M <= 20; ++M) {
    const std::vector<int> ones(M, 1);
    EXPECT_NEAR(mu_p2(ones, 2, Field::Real).mu / mu_p1(M, Field::Real).mu, 1.0, 1e-12);
    EXPECT_NEAR(mu_p2(ones, 2, Field::Complex).mu / mu_p1(M, Field::Complex).mu, 1.0, 1e-12);
    EXPECT_NEAR(mu_p2(ones, 1, Field::Real).mu / (27.0 * M * M / kPi), 1.0, 1e-12);
  }
  EXPECT_NEAR(mu_p2({2}, 3, Field::Real).mu, 27.0 * 4.0 * 2.0 / kPi, 1e-12 * 100.0);
  EXPECT_NEAR(mu_p2({1, 2, 3}, 3, Field::Complex).mu, 12.0 * (3.0 + 4.0 + 3.0) / kSqrtPi, 1e-12 * 100.0);
}

TEST(Bounds, DerivedConstants) {
  for (Field f : {Field::Real, Field::Complex}) {
    const auto b = mu_p2({1, 2, 2}, 4, f);
    EXPECT_NEAR(3.0 * b.alpha_thresh, b.mu, 1e-12 * b.mu);
    EXPECT_NEAR(b.sigma, 0.0758, 1e-4);
    EXPECT_EQ(b.model, Model::P2);
    EXPECT_EQ(b.field, f);
  }
  EXPECT_NEAR(success_probability(), (2.0 - kSqrtPi) / 3.0, 1e-16);
}

TEST(Bounds, MonotoneInUsers) {
  for (std::size_t M = 1; M < 30; ++M) {
    EXPECT_LT(mu_p1(M, Field::Real).mu, mu_p1(M + 1, Field::Real).mu);
    EXPECT_LT(mu_p1(M, Field::Complex).mu, mu_p1(M + 1, Field::Complex).mu);
  }
}

TEST(Bounds, InvalidInputThrows) {
  EXPECT_THROW(mu_p1(0, Field::Real), Error);
  EXPECT_THROW(mu_p2({}, 2, Field::Real), Error);
  EXPECT_THROW(mu_p2({3}, 2, Field::Real), Error);
  EXPECT_THROW(mu_p2({0}, 2, Field::Real), Error);
  EXPECT_THROW(mu_p2({1}, 0, Field::Real), Error);
}

TEST(Bounds, RatioCheck) {
  const auto b = mu_p1(2, Field::Real);
  EXPECT_TRUE(check_ratio(2.0, 1.0, b).satisfied);
  EXPECT_DOUBLE_EQ(check_ratio(2.0, 1.0, b).ratio, 2.0);
  EXPECT_FALSE(check_ratio(b.mu * 1.01, 1.0, b).satisfied);
  EXPECT_THROW(check_ratio(1.0, 0.0, b), Error);
}
