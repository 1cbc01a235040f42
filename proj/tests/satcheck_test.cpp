// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mexec {
namespace {

constexpr const char* kPi = "2^x <= 5 && x*x >= 5 && x >= 0";

TEST(CompileConstraint, HandEvaluatedPoints) {
  Objective f = compile_constraint(parse_constraint(kPi));
  EXPECT_EQ(f({0.0}), 25.0);
  EXPECT_EQ(f({2.3}), 0.0);
  EXPECT_EQ(f.arity(), 1);
}

TEST(CompileConstraint, EmptyConjunctionIsZero) {
  Constraint c;
  c.variables = {"x"};
  Objective f = compile_constraint(c);
  EXPECT_EQ(f({123.0}), 0.0);
}

TEST(CompileConstraint, ZeroIffSatisfiedOnGrid) {
  Constraint c = parse_constraint("x*y >= 1 && x - y < 0.5 && y != 2");
  Objective f = compile_constraint(c);
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      Vec v = {i * 0.25, j * 0.25};
      double fx = f(v);
      EXPECT_GE(fx, 0.0);
      bool holds = v[0] * v[1] >= 1 && v[0] - v[1] < 0.5 && v[1] != 2;
      EXPECT_EQ(fx == 0.0, holds) << v[0] << "," << v[1];
      EXPECT_EQ(satisfies(c, v), holds);
    }
  }
}

TEST(ParseConstraint, Errors) {
  try {
    parse_constraint("x + z < 1", {"x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownVariable);
  }
  EXPECT_THROW(parse_constraint("x <"), SyntaxError);
}

TEST(CheckSat, PowerSquareWindow) {
  SatResult r = check_sat(parse_constraint(kPi), SearchConfig{});
  ASSERT_EQ(r.verdict, Verdict::Sat);
  ASSERT_TRUE(r.model);
  EXPECT_GE((*r.model)[0], std::sqrt(5.0) - 1e-6);
  EXPECT_LE((*r.model)[0], std::log2(5.0) + 1e-6);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(CheckSat, NeverEqualIsUnknownWithUnitResidual) {
  SatResult r = check_sat(parse_constraint("x == x + 1"), SearchConfig{});
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_FALSE(r.model);
  EXPECT_EQ(r.residual, 1.0);
}

TEST(CheckSat, UnderflowingGapStaysUnknown) {
  Constraint c = parse_constraint("x >= 1e-20 && x <= 0");
  EXPECT_GT(compile_constraint(c)({0.0}), 0.0);
  SearchConfig cfg;
  cfg.n_start = 50;
  SatResult r = check_sat(c, cfg);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_GT(r.residual, 0.0);
}

TEST(CheckSat, SatModelsReplay) {
  for (const char* text : {"x*x + y*y <= 1 && x + y >= 1.2", "sin(x) >= 0.99 && x > 10", "x*y == 6 && x - y == 1"}) {
    Constraint c = parse_constraint(text);
    SearchConfig cfg;
    cfg.n_start = 100;
    SatResult r = check_sat(c, cfg);
    if (r.verdict == Verdict::Sat) EXPECT_TRUE(satisfies(c, *r.model)) << text;
  }
}

}  // namespace
}  // namespace mexec
