// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "mexec/ast.hpp"
#include "mexec/interp.hpp"

namespace mexec {

namespace detail {

inline std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string type_text(ValueType t) {
  switch (t) {
    case ValueType::Void: return "void";
    case ValueType::Real: return "real";
    case ValueType::Int: return "int";
    case ValueType::RealPtr: return "real*";
    case ValueType::RealPtrPtr: return "real**";
  }
  return "real";
}

inline std::string expr_text(const ExprPtr& e) {
  if (!e) return "";
  switch (e->kind) {
    case ExprKind::Number:
      return e->text.empty() ? number_text(e->value) : e->text;
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::PtrRef:
      return e->text.empty() ? "v" + std::to_string(e->slot) : e->text;
    case ExprKind::Deref:
      return "*" + e->text;
    case ExprKind::Unary:
      return "(" + std::string(to_string(e->unary_op)) + expr_text(e->args[0]) + ")";
    case ExprKind::Binary:
      return "(" + expr_text(e->args[0]) + " " + std::string(to_string(e->binary_op)) + " " +
             expr_text(e->args[1]) + ")";
    case ExprKind::Cast:
      return "((" + type_text(e->type) + ") " + expr_text(e->args[0]) + ")";
    case ExprKind::Call: {
      std::string s = e->text + "(";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) s += ", ";
        s += expr_text(e->args[i]);
      }
      return s + ")";
    }
  }
  return "";
}

inline std::string condition_text(const Condition& c) {
  return expr_text(c.lhs) + " " + std::string(to_string(c.op)) + " " + expr_text(c.rhs);
}

class Printer {
 public:
  using Hook = std::function<std::string(const Condition&)>;

  explicit Printer(Hook hook = {}) : hook_(std::move(hook)) {}

  std::string function(const FunctionDef& fn, const std::string& name) {
    out_.str("");
    out_ << type_text(fn.return_type) << " " << name << "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) out_ << ", ";
      out_ << type_text(fn.params[i].type) << " " << fn.params[i].name;
    }
    out_ << ") ";
    block(*fn.body, 0);
    out_ << "\n";
    return out_.str();
  }

 private:
  void indent(int depth) { out_ << std::string(2 * depth, ' '); }

  void block(const Stmt& s, int depth) {
    out_ << "{\n";
    for (const auto& b : s.body) stmt(*b, depth + 1);
    indent(depth);
    out_ << "}";
  }

  void instrument(const Condition& c, int depth) {
    if (!hook_ || !c.instrumentable) return;
    indent(depth);
    out_ << hook_(c) << "\n";
  }

  // Body of if/while/else: blocks stay inline, other statements indent.
  void nested(const Stmt& s, int depth) {
    if (s.kind == StmtKind::Block && s.name != "decls") {
      out_ << " ";
      block(s, depth);
      out_ << "\n";
    } else {
      out_ << "\n";
      stmt(s, depth + 1);
    }
  }

  void stmt(const Stmt& s, int depth) {
    switch (s.kind) {
      case StmtKind::Block:
        if (s.name == "decls") {
          indent(depth);
          out_ << type_text(s.body.front()->type) << " ";
          for (std::size_t i = 0; i < s.body.size(); ++i) {
            if (i) out_ << ", ";
            const Stmt& d = *s.body[i];
            out_ << d.name;
            if (d.value) out_ << " = " << expr_text(d.value);
          }
          out_ << ";\n";
          return;
        }
        indent(depth);
        block(s, depth);
        out_ << "\n";
        return;
      case StmtKind::Empty:
        indent(depth);
        out_ << ";\n";
        return;
      case StmtKind::Decl:
        indent(depth);
        out_ << type_text(s.type) << " " << s.name;
        if (s.value) out_ << " = " << expr_text(s.value);
        out_ << ";\n";
        return;
      case StmtKind::Assign:
        indent(depth);
        out_ << s.name << " " << to_string(s.assign_op) << " " << expr_text(s.value) << ";\n";
        return;
      case StmtKind::Store:
        indent(depth);
        out_ << "*" << s.name << " = " << expr_text(s.value) << ";\n";
        return;
      case StmtKind::IncDec:
        indent(depth);
        out_ << s.name << (s.delta > 0 ? "++" : "--") << ";\n";
        return;
      case StmtKind::ExprStmt:
        indent(depth);
        out_ << expr_text(s.value) << ";\n";
        return;
      case StmtKind::Return:
        indent(depth);
        out_ << "return";
        if (s.value) out_ << " " << expr_text(s.value);
        out_ << ";\n";
        return;
      case StmtKind::If: {
        instrument(*s.cond, depth);
        indent(depth);
        out_ << "if (" << condition_text(*s.cond) << ")";
        const bool dangling = s.else_branch && s.then_branch->kind == StmtKind::If &&
                              !s.then_branch->else_branch;
        if (dangling) {
          out_ << " {\n";
          stmt(*s.then_branch, depth + 1);
          indent(depth);
          out_ << "}\n";
        } else {
          nested(*s.then_branch, depth);
        }
        if (s.else_branch) {
          indent(depth);
          out_ << "else";
          nested(*s.else_branch, depth);
        }
        return;
      }
      case StmtKind::While: {
        instrument(*s.cond, depth);
        indent(depth);
        out_ << "while (" << condition_text(*s.cond) << ")";
        if (hook_ && s.cond->instrumentable) {
          out_ << " {\n";
          stmt(*s.then_branch, depth + 1);
          instrument(*s.cond, depth + 1);
          indent(depth);
          out_ << "}\n";
        } else {
          nested(*s.then_branch, depth);
        }
        return;
      }
    }
  }

  Hook hook_;
  std::ostringstream out_;
};

inline bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->type != b->type || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case ExprKind::Number:
    case ExprKind::Const:
      if (a->value != b->value) return false;
      break;
    case ExprKind::Var:
    case ExprKind::Deref:
    case ExprKind::PtrRef:
      if (a->slot != b->slot) return false;
      break;
    case ExprKind::Unary:
      if (a->unary_op != b->unary_op) return false;
      break;
    case ExprKind::Binary:
      if (a->binary_op != b->binary_op) return false;
      break;
    case ExprKind::Call:
      if (a->function != b->function || a->text != b->text || a->call_site != b->call_site) return false;
      break;
    case ExprKind::Cast:
      break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same_expr(a->args[i], b->args[i])) return false;
  }
  return true;
}

inline bool same_stmt(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->slot != b->slot || a->name != b->name || a->type != b->type ||
      a->assign_op != b->assign_op || a->delta != b->delta || a->body.size() != b->body.size()) {
    return false;
  }
  if (!same_expr(a->value, b->value)) return false;
  if (static_cast<bool>(a->cond) != static_cast<bool>(b->cond)) return false;
  if (a->cond) {
    const Condition& x = *a->cond;
    const Condition& y = *b->cond;
    if (x.label != y.label || x.op != y.op || x.instrumentable != y.instrumentable ||
        !same_expr(x.lhs, y.lhs) || !same_expr(x.rhs, y.rhs)) {
      return false;
    }
  }
  if (!same_stmt(a->then_branch, b->then_branch) || !same_stmt(a->else_branch, b->else_branch)) {
    return false;
  }
  for (std::size_t i = 0; i < a->body.size(); ++i) {
    if (!same_stmt(a->body[i], b->body[i])) return false;
  }
  return true;
}

}  // namespace detail

// Source text for `p`; reparsing it yields a structurally identical program.
inline std::string print(const Program& p) {
  std::string out;
  for (const auto& c : p.constants) {
    out += "const " + detail::type_text(c.type) + " " + c.name + " = " +
           (c.text.empty() ? detail::number_text(c.value) : c.text) + ";\n";
  }
  if (!p.constants.empty()) out += "\n";
  detail::Printer printer;
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    if (f) out += "\n";
    out += printer.function(p.functions[f], p.functions[f].name);
  }
  return out;
}

// Structural equality ignoring source positions.
inline bool structurally_equal(const Program& a, const Program& b) {
  if (a.functions.size() != b.functions.size() || a.constants.size() != b.constants.size()) return false;
  for (std::size_t i = 0; i < a.constants.size(); ++i) {
    const auto& x = a.constants[i];
    const auto& y = b.constants[i];
    if (x.name != y.name || x.type != y.type || x.value != y.value) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& x = a.functions[i];
    const auto& y = b.functions[i];
    if (x.name != y.name || x.return_type != y.return_type || x.params.size() != y.params.size() ||
        x.frame_size != y.frame_size) {
      return false;
    }
    for (std::size_t k = 0; k < x.params.size(); ++k) {
      if (x.params[k].name != y.params[k].name || x.params[k].type != y.params[k].type) return false;
    }
    if (!detail::same_stmt(x.body, y.body)) return false;
  }
  return true;
}

// The instrumented form of the entry function (suffix _I) with the injected
// representing-function updates, followed by the _R driver that returns r.
inline std::string print_instrumented(const Program& p, const RepFunConfig& cfg) {
  auto hook = [&cfg](const Condition& c) -> std::string {
    const std::string args = std::to_string(c.label) + ", \"" + std::string(to_string(c.op)) +
                             "\", " + detail::expr_text(c.lhs) + ", " + detail::expr_text(c.rhs);
    const std::string eq_args = "\"==\", " + detail::expr_text(c.lhs) + ", " + detail::expr_text(c.rhs);
    switch (cfg.mode) {
      case Mode::Coverage: return "r = pen(" + args + ");";
      case Mode::Path: return "r = r + d_toward_target(" + args + ");";
      case Mode::Bva: return "r = r * d(" + eq_args + ");";
      case Mode::Sat: return "r = r + d(\"" + std::string(to_string(c.op)) + "\", " +
                             detail::expr_text(c.lhs) + ", " + detail::expr_text(c.rhs) + ");";
    }
    return "";
  };
  const FunctionDef& entry = p.entry_function();
  std::string out = "double r;\n\n";
  detail::Printer printer(hook);
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    const auto& fn = p.functions[f];
    const bool is_entry = static_cast<int>(f) == p.entry;
    out += printer.function(fn, is_entry ? fn.name + "_I" : fn.name) + "\n";
  }
  std::string params, args;
  for (std::size_t i = 0; i < entry.params.size(); ++i) {
    if (i) {
      params += ", ";
      args += ", ";
    }
    params += detail::type_text(entry.params[i].type) + " " + entry.params[i].name;
    args += entry.params[i].name;
  }
  out += "double " + entry.name + "_R(" + params + ") {\n";
  out += "  r = " + detail::number_text(cfg.r0) + ";\n";
  out += "  " + entry.name + "_I(" + args + ");\n";
  out += "  return r;\n}\n";
  return out;
}

}  // namespace mexec
