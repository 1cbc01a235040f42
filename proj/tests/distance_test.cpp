// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "mexec/distance.hpp"

namespace mexec {
namespace {

bool holds(CompareOp op, double a, double b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::Gt: return a > b;
  }
  return false;
}

TEST(BranchDistance, Examples) {
  EXPECT_EQ(branch_distance(CompareOp::Eq, 3.0, 5.0, 0.1), 4.0);
  EXPECT_EQ(branch_distance(CompareOp::Le, 1.0, 2.0, 0.1), 0.0);
  EXPECT_EQ(branch_distance(CompareOp::Lt, 2.0, 2.0, 1e-6), 1e-6);
  EXPECT_EQ(branch_distance(CompareOp::Ne, 2.0, 2.0, 1e-6), 1e-6);
  EXPECT_EQ(branch_distance(CompareOp::Le, 3.0, 1.0), 4.0);
  EXPECT_EQ(branch_distance(CompareOp::Lt, 3.0, 1.0, 1e-6), 4.0 + 1e-6);
  EXPECT_EQ(branch_distance(CompareOp::Ne, 2.0, 3.0), 0.0);
}

TEST(BranchDistance, Duality) {
  EXPECT_EQ(branch_distance(CompareOp::Ge, 1.0, 3.0), branch_distance(CompareOp::Le, 3.0, 1.0));
  EXPECT_EQ(branch_distance(CompareOp::Gt, 1.0, 1.0), branch_distance(CompareOp::Lt, 1.0, 1.0));
}

TEST(BranchDistance, TinyGapsStayPositive) {
  // (1e-200)^2 underflows; the distance must still be nonzero.
  EXPECT_GT(branch_distance(CompareOp::Eq, 0.0, 1e-200), 0.0);
  EXPECT_GT(branch_distance(CompareOp::Le, 1e-200, 0.0), 0.0);
  EXPECT_EQ(branch_distance(CompareOp::Eq, 0.0, -0.0), 0.0);
  EXPECT_GT(guarded_product(1e-200, 1e-200), 0.0);
  EXPECT_EQ(guarded_product(0.0, 5.0), 0.0);
}

TEST(BranchDistance, HugeGapsSaturate) {
  double d = branch_distance(CompareOp::Eq, -1e300, 1e300);
  EXPECT_TRUE(d > 0.0);
}

TEST(BranchDistance, PropertySuite) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> small(-10.0, 10.0), expo(-300.0, 300.0);
  std::uniform_int_distribution<int> kind(0, 3);
  auto value = [&]() {
    switch (kind(rng)) {
      case 0: return std::round(small(rng));
      case 1: return small(rng);
      case 2: return (small(rng) < 0 ? -1.0 : 1.0) * std::pow(10.0, expo(rng));
      default: return 0.0;
    }
  };
  for (int i = 0; i < 100000; ++i) {
    CompareOp op = kAllCompareOps[rng() % 6];
    double a = value();
    double b = kind(rng) == 0 ? a : value();
    double d = branch_distance(op, a, b);
    ASSERT_GE(d, 0.0);
    ASSERT_EQ(d == 0.0, holds(op, a, b)) << to_string(op) << " " << a << " " << b;
    ASSERT_EQ(branch_distance(CompareOp::Ge, a, b), branch_distance(CompareOp::Le, b, a));
    ASSERT_EQ(branch_distance(CompareOp::Gt, a, b), branch_distance(CompareOp::Lt, b, a));
  }
}

TEST(CompareOps, NegationIsLogicalComplement) {
  for (CompareOp op : kAllCompareOps) {
    for (double a : {-1.0, 0.0, 1.0}) {
      for (double b : {-1.0, 0.0, 1.0}) EXPECT_NE(holds(op, a, b), holds(negate(op), a, b));
    }
  }
}

}  // namespace
}  // namespace mexec
