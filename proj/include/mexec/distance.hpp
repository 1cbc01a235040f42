// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>

#include "mexec/ast.hpp"

namespace mexec {

inline constexpr double kDefaultEpsilon = 1e-6;
// Representing value reported for aborted evaluations.
inline constexpr double kSentinel = 1e300;

namespace detail {

// (a-b)^2, never rounding a nonzero difference to zero.
inline double squared_gap(double a, double b) {
  if (a == b) return 0.0;
  double d = a - b;
  double sq = d * d;
  if (sq == 0.0) return std::numeric_limits<double>::denorm_min();
  return sq;
}

}  // namespace detail

// d_eps(op, a, b): zero exactly when `a op b` holds, positive otherwise.
// Operands must not be NaN.
inline double branch_distance(CompareOp op, double a, double b, double eps = kDefaultEpsilon) {
  switch (op) {
    case CompareOp::Eq:
      return detail::squared_gap(a, b);
    case CompareOp::Le:
      return a <= b ? 0.0 : detail::squared_gap(a, b);
    case CompareOp::Lt:
      return a < b ? 0.0 : detail::squared_gap(a, b) + eps;
    case CompareOp::Ne:
      return a != b ? 0.0 : eps;
    case CompareOp::Ge:
      return branch_distance(CompareOp::Le, b, a, eps);
    case CompareOp::Gt:
      return branch_distance(CompareOp::Lt, b, a, eps);
  }
  return 0.0;
}

// r * d without flushing a positive product to zero.
inline double guarded_product(double r, double d) {
  double out = r * d;
  if (out == 0.0 && r != 0.0 && d != 0.0) return std::numeric_limits<double>::denorm_min();
  return out;
}

}  // namespace mexec
