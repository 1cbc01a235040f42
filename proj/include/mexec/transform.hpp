// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/error.hpp"
#include "mexec/parser.hpp"

namespace mexec {

namespace detail {

inline ExprPtr lower_expr(const ExprPtr& e) {
  if (!e) return e;
  switch (e->kind) {
    case ExprKind::Number:
    case ExprKind::Const:
    case ExprKind::Var:
      return e;
    case ExprKind::Deref: {
      if (e->type != ValueType::Real) {
        throw Error(ErrorKind::UnsupportedPointerUse, e->pos,
                    "pointer-to-pointer dereference of '" + e->text + "'");
      }
      auto v = std::make_shared<Expr>(*e);
      v->kind = ExprKind::Var;
      return v;
    }
    case ExprKind::PtrRef:
      // Legal only as a bare comparison operand; lower_condition handles it.
      throw Error(ErrorKind::UnsupportedPointerUse, e->pos,
                  "pointer '" + e->text + "' used as a value");
    default:
      break;
  }
  bool changed = false;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) {
    if (is_pointer(a->type)) {
      throw Error(ErrorKind::UnsupportedPointerUse, a->pos, "pointer arithmetic");
    }
    ExprPtr la = lower_expr(a);
    changed |= la != a;
    args.push_back(std::move(la));
  }
  if (!changed) return e;
  auto copy = std::make_shared<Expr>(*e);
  copy->args = std::move(args);
  return copy;
}

inline ExprPtr lower_operand(const ExprPtr& e, bool& has_pointer) {
  if (e->kind == ExprKind::PtrRef) {
    if (e->type != ValueType::RealPtr) {
      throw Error(ErrorKind::UnsupportedPointerUse, e->pos, "pointer-to-pointer comparison");
    }
    has_pointer = true;
    return e;
  }
  return lower_expr(e);
}

inline ConditionPtr lower_condition(const ConditionPtr& c) {
  bool has_pointer = false;
  ExprPtr l = lower_operand(c->lhs, has_pointer);
  ExprPtr r = lower_operand(c->rhs, has_pointer);
  if (l == c->lhs && r == c->rhs && !has_pointer) return c;
  auto copy = std::make_shared<Condition>(*c);
  copy->lhs = l;
  copy->rhs = r;
  if (has_pointer) {
    copy->instrumentable = false;
    copy->uninstrumentable_reason = "pointer comparison";
  }
  return copy;
}

inline StmtPtr lower_stmt(const StmtPtr& s) {
  if (!s) return s;
  auto copy = std::make_shared<Stmt>(*s);
  switch (s->kind) {
    case StmtKind::Block:
      for (auto& b : copy->body) b = lower_stmt(b);
      break;
    case StmtKind::If:
      copy->cond = lower_condition(s->cond);
      copy->then_branch = lower_stmt(s->then_branch);
      copy->else_branch = lower_stmt(s->else_branch);
      break;
    case StmtKind::While:
      copy->cond = lower_condition(s->cond);
      copy->then_branch = lower_stmt(s->then_branch);
      break;
    case StmtKind::Store:
      if (s->type != ValueType::RealPtr) {
        throw Error(ErrorKind::UnsupportedPointerUse, s->pos, "store through a pointer-to-pointer");
      }
      copy->kind = StmtKind::Assign;
      copy->assign_op = AssignOp::Set;
      copy->type = ValueType::Real;
      copy->value = lower_expr(s->value);
      break;
    default:
      if (s->value) copy->value = lower_expr(s->value);
      break;
  }
  return copy;
}

inline ExprPtr to_real(const ExprPtr& e) {
  auto c = std::make_shared<Expr>();
  c->kind = ExprKind::Cast;
  c->type = ValueType::Real;
  c->pos = e->pos;
  c->args = {e};
  return c;
}

template <class F>
StmtPtr map_conditions(const StmtPtr& s, const F& f) {
  if (!s) return s;
  switch (s->kind) {
    case StmtKind::Block: {
      auto copy = std::make_shared<Stmt>(*s);
      for (auto& b : copy->body) b = map_conditions(b, f);
      return copy;
    }
    case StmtKind::If: {
      auto copy = std::make_shared<Stmt>(*s);
      copy->cond = std::make_shared<Condition>(f(*s->cond));
      copy->then_branch = map_conditions(s->then_branch, f);
      copy->else_branch = map_conditions(s->else_branch, f);
      return copy;
    }
    case StmtKind::While: {
      auto copy = std::make_shared<Stmt>(*s);
      copy->cond = std::make_shared<Condition>(f(*s->cond));
      copy->then_branch = map_conditions(s->then_branch, f);
      return copy;
    }
    default:
      return s;
  }
}

}  // namespace detail

// Replaces real-pointer parameters by scalars. `*p` reads and `*p = e`
// stores become plain variable accesses; conditionals comparing a bare
// pointer stay in place but are flagged uninstrumentable.
inline Program lower_pointers(const Program& p) {
  Program out = p;
  for (auto& fn : out.functions) {
    for (auto& param : fn.params) {
      if (param.type == ValueType::RealPtrPtr) {
        throw Error(ErrorKind::UnsupportedPointerUse, fn.pos,
                    "pointer-to-pointer parameter '" + param.name + "'");
      }
      if (param.type == ValueType::RealPtr) param.type = ValueType::Real;
    }
    fn.body = detail::lower_stmt(fn.body);
  }
  index_program(out);
  return out;
}

// Wraps int-valued operands in a conversion to real so the branch distance
// always compares reals. Non-numeric operands flag the condition instead.
inline Condition promote_integers(const Condition& c) {
  Condition out = c;
  if (!c.instrumentable) return out;
  if (!is_numeric(c.lhs->type) || !is_numeric(c.rhs->type)) {
    out.instrumentable = false;
    out.uninstrumentable_reason = "non-numeric operand";
    return out;
  }
  if (c.lhs->type == ValueType::Int) out.lhs = detail::to_real(c.lhs);
  if (c.rhs->type == ValueType::Int) out.rhs = detail::to_real(c.rhs);
  return out;
}

inline Program promote_integers(const Program& p) {
  Program out = p;
  for (auto& fn : out.functions) {
    fn.body = detail::map_conditions(fn.body, [](const Condition& c) { return promote_integers(c); });
  }
  index_program(out);
  return out;
}

// The normalization every search mode runs before execution.
inline Program prepare(const Program& p) {
  return promote_integers(lower_pointers(p));
}

}  // namespace mexec
