#include <gtest/gtest.h>

#include <random>

#include "mbqcqp/instance_io.hpp"
#include "test_support.hpp"

using namespace mbqcqp;
namespace ts = testing_support;

namespace {

ErrorCode parse_error_code(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST(InstanceIo, ParsesComplexEntries) {
  const auto inst = parse_instance(R"({"model":"p1","field":"complex","N":2,"channels":[[[1,2],3],[0,[0,-1]]]})");
  ASSERT_TRUE(std::holds_alternative<InstanceP1>(inst));
  const auto& p = std::get<InstanceP1>(inst);
  EXPECT_EQ(p.channels[0].entries(0), cplx(1.0, 2.0));
  EXPECT_EQ(p.channels[0].entries(1), cplx(3.0, 0.0));
  EXPECT_EQ(p.channels[1].entries(1), cplx(0.0, -1.0));
}

TEST(InstanceIo, RoundTrip) {
  std::mt19937_64 g(1);
  for (Field f : {Field::Real, Field::Complex}) {
    const auto p1 = ts::random_p1(g, 3, 4, f);
    const auto back1 = std::get<InstanceP1>(instance_from_json(to_json(p1)));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back1.channels[i].entries, p1.channels[i].entries);
    const auto p2 = ts::random_p2(g, 3, 2, 3, f);
    const auto back2 = std::get<InstanceP2>(parse_instance(to_json(p2).dump()));
    EXPECT_EQ(back2.priorities, p2.priorities);
    EXPECT_EQ(back2.Q, p2.Q);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back2.channels[i].entries, p2.channels[i].entries);
  }
}

TEST(InstanceIo, RejectsMalformedInput) {
  EXPECT_EQ(parse_error_code("{"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code("[]"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"model":"p3","field":"real","N":1,"channels":[]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"model":"p1","field":"real","channels":[[1]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"model":"p1","field":"real","N":1,"channels":[[[1,2]]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"model":"p1","field":"real","N":1,"M":2,"channels":[[1]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"model":"p2","field":"real","N":1,"Q":2,"channels":[[1]]})"), ErrorCode::ParseError);
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), Error);
}

TEST(InstanceIo, RoundedSolutionRoundTrip) {
  RoundedSolution s;
  s.beta = (Eigen::MatrixXi(2, 2) << 1, 0, 0, 1).finished();
  s.w_blocks = {(Eigen::VectorXcd(2) << cplx(0.1, 0.2), 0.3).finished(),
                (Eigen::VectorXcd(2) << cplx(-1.0, 0.5), 0.0).finished()};
  s.objective = 1.25;
  s.success = true;
  const auto back = rounded_from_json(to_json(s, Field::Complex), Field::Complex);
  EXPECT_EQ(back.beta, s.beta);
  for (std::size_t q = 0; q < 2; ++q) EXPECT_EQ(back.w_blocks[q], s.w_blocks[q]);
  EXPECT_EQ(back.objective, s.objective);
}
