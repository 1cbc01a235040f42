// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mexec {
namespace {

using testing::F0;
using testing::F1;
using testing::T0;
using testing::T1;

constexpr const char* kNested = R"(
void f(real x) {
  if (x <= 1.0) {
    if (x == 0.0) x = 5.0;
  }
}
)";

std::vector<BranchId> ids(std::initializer_list<BranchId> l) { return l; }

TEST(Cfg, NestedConditionalDescendants) {
  Cfg g = build_cfg(prepare(parse(kNested)));
  EXPECT_EQ(g.num_branches(), 4);
  EXPECT_EQ(g.descendants(T0), ids({T1, F1}));
  EXPECT_TRUE(g.descendants(F0).empty());
  EXPECT_TRUE(g.descendants(T1).empty());
}

TEST(Cfg, SequentialConditionalsRejoin) {
  Cfg g = build_cfg(prepare(parse(testing::kFoo)));
  EXPECT_EQ(g.descendants(T0), ids({T1, F1}));
  EXPECT_EQ(g.descendants(F0), ids({T1, F1}));
  EXPECT_TRUE(g.descendants(T1).empty());
}

TEST(Cfg, LoopBranchIsItsOwnDescendant) {
  Cfg g = build_cfg(prepare(parse(R"(
void f(real x, real y) {
  while (x < 10.0) {
    if (y == 0.0) y = 1.0;
    x = x + 1.0;
  }
}
)")));
  EXPECT_TRUE(g.is_descendant(T1, T1));
  EXPECT_TRUE(g.is_descendant(T1, F0));
  EXPECT_TRUE(g.is_descendant(T0, T0));
  EXPECT_TRUE(g.descendants(F0).empty());
}

TEST(Cfg, CalleeConditionalsAreDescendants) {
  Cfg g = build_cfg(prepare(parse(R"(
real h(real v) {
  if (v > 0.0) return v;
  return -v;
}
void f(real x) {
  if (x == 2.0) x = 3.0;
  real y = h(x);
}
)")));
  // Label 0 lives in h, label 1 in f.
  EXPECT_TRUE(g.is_descendant({1, true}, {0, true}));
  EXPECT_TRUE(g.is_descendant({1, false}, {0, false}));
  EXPECT_TRUE(g.descendants({0, true}).empty());
}

TEST(Cfg, UnknownEntry) {
  try {
    build_cfg(parse(testing::kFoo), "BAR");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownFunction);
  }
}

TEST(Cfg, DescendantIsTransitiveAndAcyclicWithoutLoops) {
  for (const char* rel : {"intro/foo.mx", "fdlibm/k_cos.mx", "fdlibm/s_atan.mx", "fdlibm/s_floor.mx",
                          "fdlibm/e_cosh.mx", "fdlibm/s_expm1_guard.mx"}) {
    Cfg g = build_cfg(prepare(testing::load(rel)));
    for (int b = 0; b < g.num_branches(); ++b) {
      BranchId bb = BranchId::from_index(b);
      EXPECT_FALSE(g.is_descendant(bb, bb)) << rel << " " << bb.str();
      for (BranchId c : g.descendants(bb)) {
        for (BranchId d : g.descendants(c)) {
          EXPECT_TRUE(g.is_descendant(bb, d)) << rel;
        }
      }
    }
  }
}

TEST(Saturation, NestedDiagramExplored) {
  auto g = testing::cfg_of(prepare(parse(kNested)));
  SaturationState s = update_saturation(make_saturation_state(g), ids({T0, F0, F1}));
  EXPECT_EQ(s.list(s.explored), ids({F0, F1}));
}

TEST(Saturation, EmptyAndFull) {
  auto g = testing::cfg_of(prepare(parse(testing::kFoo)));
  SaturationState s = update_saturation(make_saturation_state(g), ids({}));
  EXPECT_TRUE(s.list(s.explored).empty());
  EXPECT_FALSE(goal_reached(s));
  s = update_saturation(s, ids({T0, F0, T1, F1}));
  EXPECT_EQ(s.list(s.explored).size(), 4u);
  EXPECT_TRUE(goal_reached(s));
}

TEST(Saturation, GoalMissingOneBranch) {
  auto g = testing::cfg_of(prepare(parse(testing::kFoo)));
  SaturationState s = update_saturation(make_saturation_state(g), ids({T0, F0, F1}));
  EXPECT_FALSE(goal_reached(s));
}

TEST(Saturation, InfeasibleBranchCountsAsExplored) {
  auto g = testing::cfg_of(prepare(testing::load("intro/foo_infeasible.mx")));
  SaturationState s = update_saturation(make_saturation_state(g), ids({T0, F0, F1}));
  EXPECT_FALSE(goal_reached(s));
  s.infeasible[T1.index()] = 1;
  recompute_explored(s);
  EXPECT_TRUE(goal_reached(s));
  EXPECT_TRUE(s.is_explored(T0));
  // Covering a branch withdraws it from the infeasible set.
  s = update_saturation(s, ids({T1}));
  EXPECT_FALSE(s.is_infeasible(T1));
  EXPECT_TRUE(s.is_covered(T1));
}

TEST(Saturation, ExploredNeverShrinks) {
  auto g = testing::cfg_of(prepare(testing::load("fdlibm/s_atan.mx")));
  std::mt19937 rng(11);
  SaturationState s = make_saturation_state(g);
  for (int round = 0; round < 200; ++round) {
    std::vector<BranchId> add = {BranchId::from_index(static_cast<int>(rng() % g->num_branches()))};
    SaturationState next = update_saturation(s, add);
    for (int i = 0; i < g->num_branches(); ++i) {
      if (s.explored[i]) EXPECT_TRUE(next.explored[i]);
    }
    s = next;
  }
}

TEST(Pen, NeitherBranchExplored) {
  std::vector<char> e = testing::branches(4, {});
  EXPECT_EQ(pen(0, CompareOp::Le, 5.0, 1.0, e, 1.0), 0.0);
}

TEST(Pen, OnlyFalseBranchSaturated) {
  std::vector<char> e = testing::branches(4, {F1});
  double y = 1.7 * 1.7;
  EXPECT_NEAR(pen(1, CompareOp::Eq, y, 4.0, e, 0.0), 1.2321, 1e-12);
}

TEST(Pen, OnlyTrueBranchSaturated) {
  std::vector<char> e = testing::branches(4, {T0});
  EXPECT_NEAR(pen(0, CompareOp::Le, 0.5, 1.0, e, 0.0, 1e-6), 0.250001, 1e-15);
}

TEST(Pen, BothSaturatedPassesThrough) {
  std::vector<char> e = testing::branches(4, {T0, F0});
  EXPECT_EQ(pen(0, CompareOp::Le, 0.5, 1.0, e, 1.0), 1.0);
  EXPECT_EQ(pen(0, CompareOp::Le, 0.5, 1.0, e, 0.37), 0.37);
}

TEST(Pen, NonNegative) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 5000; ++i) {
    std::vector<char> e = {static_cast<char>(rng() & 1), static_cast<char>(rng() & 1)};
    auto op = kAllCompareOps[rng() % 6];
    EXPECT_GE(pen(0, op, u(rng), u(rng), e, std::fabs(u(rng))), 0.0);
  }
}

}  // namespace
}  // namespace mexec
