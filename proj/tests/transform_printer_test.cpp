// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mexec {
namespace {

using testing::kFoo;

const StmtPtr& first_stmt(const Program& p) { return p.entry_function().body->body.front(); }

TEST(LowerPointers, DereferencedParameterBecomesScalar) {
  Program ptr = parse("void FOO(real* p) { if (*p <= 1.0) *p = *p + 1.0; }");
  Program scalar = parse("void FOO(real p) { if (p <= 1.0) p = p + 1.0; }");
  Program lowered = lower_pointers(ptr);
  EXPECT_EQ(lowered.entry_function().params[0].type, ValueType::Real);
  EXPECT_TRUE(structurally_equal(lowered, scalar));
  EXPECT_TRUE(lowered.conditions[0].instrumentable);
}

TEST(LowerPointers, ScalarProgramUnchanged) {
  Program p = parse(kFoo);
  EXPECT_TRUE(structurally_equal(lower_pointers(p), p));
}

TEST(LowerPointers, PointerComparisonIsFlagged) {
  Program p = lower_pointers(parse("void FOO(real* p) { if (p != 0) *p = 1.0; if (*p > 2.0) *p = 0.0; }"));
  ASSERT_EQ(p.num_conditions(), 2);
  EXPECT_FALSE(p.conditions[0].instrumentable);
  EXPECT_EQ(p.conditions[0].reason, "pointer comparison");
  EXPECT_TRUE(p.conditions[1].instrumentable);
}

TEST(LowerPointers, RejectsPointerToPointer) {
  try {
    lower_pointers(parse("void FOO(real** p) { return; }"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedPointerUse);
  }
}

TEST(PromoteIntegers, IntegerOperandsWrappedInRealCast) {
  Program p = prepare(parse("void f(real x) { int ix = hiword(x); if (ix < 0x3e400000) x = 1.0; }"));
  const Condition& c = *p.entry_function().body->body[1]->cond;
  EXPECT_EQ(c.lhs->kind, ExprKind::Cast);
  EXPECT_EQ(c.lhs->type, ValueType::Real);
  EXPECT_EQ(c.rhs->kind, ExprKind::Cast);
}

TEST(PromoteIntegers, RealConditionUnchanged) {
  Program p = parse(kFoo);
  const Condition& before = *first_stmt(p)->cond;
  Condition after = promote_integers(before);
  EXPECT_EQ(after.lhs, before.lhs);
  EXPECT_EQ(after.rhs, before.rhs);
}

TEST(PromoteIntegers, PromotedComparisonMatchesIntegerComparison) {
  Program p = prepare(parse("void f(real x) { if (hiword(x) < 0x3e400000) x = 1.0; }"));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-40.0, 40.0);
  for (int i = 0; i < 2000; ++i) {
    double x = (i % 2 ? -1.0 : 1.0) * std::pow(2.0, e(rng));
    auto t = execute(p, {x}, RepFunConfig::sat());
    ASSERT_EQ(t.path.size(), 1u);
    EXPECT_EQ(t.path[0].taken, detail::hiword(x) < 0x3e400000) << x;
  }
}

TEST(Transforms, LabelsStableThroughPrepare) {
  Program src = testing::load("fdlibm/k_cos.mx");
  Program p = prepare(src);
  ASSERT_EQ(p.num_conditions(), src.num_conditions());
  for (int i = 0; i < p.num_conditions(); ++i) {
    EXPECT_EQ(p.conditions[i].pos.line, src.conditions[i].pos.line);
    EXPECT_EQ(p.conditions[i].op, src.conditions[i].op);
  }
}

TEST(Printer, RoundTripIsStructurallyIdentical) {
  for (const char* rel : {"intro/foo.mx", "intro/foo_infeasible.mx", "fdlibm/k_cos.mx", "fdlibm/s_floor.mx",
                          "fdlibm/s_atan.mx", "fdlibm/e_cosh.mx", "fdlibm/e_log10.mx"}) {
    Program a = testing::load(rel);
    Program b = parse(print(a));
    EXPECT_TRUE(structurally_equal(a, b)) << rel << "\n" << print(a);
  }
}

TEST(Printer, DanglingElseKeepsItsMeaning) {
  Program a = parse("void f(real x) { if (x < 1.0) { if (x < 0.0) x = 2.0; } else x = 3.0; }");
  Program b = parse(print(a));
  EXPECT_TRUE(structurally_equal(a, b)) << print(a);
}

TEST(Printer, InstrumentedFooHasPenBeforeEachConditional) {
  std::string s = print_instrumented(prepare(parse(kFoo)), RepFunConfig::coverage());
  EXPECT_NE(s.find("void FOO_I(real x)"), std::string::npos);
  EXPECT_NE(s.find("r = pen(0, \"<=\", x, 1.0);"), std::string::npos);
  EXPECT_NE(s.find("r = pen(1, \"==\", y, 4.0);"), std::string::npos);
  EXPECT_NE(s.find("double FOO_R(real x)"), std::string::npos);
  EXPECT_NE(s.find("r = 1.0;"), std::string::npos);
  EXPECT_LT(s.find("r = pen(0"), s.find("if (x <= 1.0)"));
}

TEST(Printer, InstrumentedPathAndBvaForms) {
  Program p = prepare(parse(kFoo));
  std::string path = print_instrumented(p, RepFunConfig::path({{0, true}, {1, true}}));
  EXPECT_NE(path.find("r = 0.0;"), std::string::npos);
  EXPECT_NE(path.find("r = r + "), std::string::npos);
  std::string bva = print_instrumented(p, RepFunConfig::bva());
  EXPECT_NE(bva.find("r = r * d(\"==\", x, 1.0);"), std::string::npos);
}

}  // namespace
}  // namespace mexec
