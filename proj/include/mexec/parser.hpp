// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/error.hpp"
#include "mexec/lexer.hpp"

namespace mexec {

// Rebuilds the label / call-site / line side tables of `p` by walking its
// functions in source order.
inline void index_program(Program& p) {
  p.conditions.clear();
  p.call_sites.clear();
  p.statement_lines.assign(p.functions.size(), {});

  std::map<int, ConditionInfo> conds;
  std::map<int, CallSiteInfo> calls;

  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    const int fn = static_cast<int>(f);
    std::function<void(const ExprPtr&)> visit_expr = [&](const ExprPtr& e) {
      if (!e) return;
      if (e->kind == ExprKind::Call) {
        CallSiteInfo info;
        info.id = e->call_site;
        info.function = fn;
        info.pos = e->pos;
        info.callee = e->text;
        info.counted = e->function >= 0 || builtin_info(e->builtin).counts_as_call;
        calls[e->call_site] = info;
      }
      for (const auto& a : e->args) visit_expr(a);
    };
    auto visit_cond = [&](const ConditionPtr& c, bool loop) {
      ConditionInfo info;
      info.label = c->label;
      info.function = fn;
      info.pos = c->pos;
      info.op = c->op;
      info.is_loop = loop;
      info.instrumentable = c->instrumentable;
      info.reason = c->uninstrumentable_reason;
      conds[c->label] = info;
      visit_expr(c->lhs);
      visit_expr(c->rhs);
    };
    std::function<void(const StmtPtr&)> visit = [&](const StmtPtr& s) {
      if (!s) return;
      if (s->kind != StmtKind::Block && s->kind != StmtKind::Empty) {
        p.statement_lines[f].push_back(s->pos.line);
      }
      switch (s->kind) {
        case StmtKind::Block:
          for (const auto& b : s->body) visit(b);
          break;
        case StmtKind::If:
          visit_cond(s->cond, false);
          visit(s->then_branch);
          visit(s->else_branch);
          break;
        case StmtKind::While:
          visit_cond(s->cond, true);
          visit(s->then_branch);
          break;
        default:
          visit_expr(s->value);
          break;
      }
    };
    visit(p.functions[f].body);
  }

  for (auto& [label, info] : conds) {
    if (label != static_cast<int>(p.conditions.size())) {
      throw Error(ErrorKind::InvalidConfig, "conditional labels are not dense");
    }
    p.conditions.push_back(info);
  }
  for (auto& [id, info] : calls) {
    if (id != static_cast<int>(p.call_sites.size())) {
      throw Error(ErrorKind::InvalidConfig, "call-site ids are not dense");
    }
    p.call_sites.push_back(info);
  }
}

namespace detail {

struct Symbol {
  int slot = -1;
  ValueType type = ValueType::Real;
};

struct FunctionSig {
  std::string name;
  ValueType return_type;
  std::vector<ValueType> params;
};

inline bool is_type_word(const Token& t) {
  return t.is_word("real") || t.is_word("double") || t.is_word("int") ||
         t.is_word("void");
}

class Parser {
 public:
  struct Options {
    // Undeclared identifiers become fresh real variables (constraint mode).
    bool auto_declare = false;
    // When non-empty in constraint mode, only these names may appear.
    std::vector<std::string> allowed_variables;
  };

  explicit Parser(std::vector<Token> tokens) : Parser(std::move(tokens), Options{}) {}
  Parser(std::vector<Token> tokens, Options opts)
      : toks_(std::move(tokens)), opts_(std::move(opts)) {}

  Program parse_program() {
    Program prog;
    // Pass 1: constants and function headers, bodies skipped.
    std::vector<std::size_t> body_starts;
    while (!peek().kind_is_end()) {
      if (peek().is_word("const") || peek().is_word("static")) {
        prog.constants.push_back(parse_constant());
        continue;
      }
      FunctionDef fn = parse_header();
      if (find_builtin(fn.name)) {
        throw Error(ErrorKind::DuplicateFunction, fn.pos,
                    "'" + fn.name + "' shadows a builtin");
      }
      if (prog.find_function(fn.name) >= 0) {
        throw Error(ErrorKind::DuplicateFunction, fn.pos,
                    "function '" + fn.name + "' defined twice");
      }
      body_starts.push_back(pos_);
      skip_braced_block();
      prog.functions.push_back(std::move(fn));
    }
    if (prog.functions.empty()) {
      throw SyntaxError(peek().pos, "a function definition", peek().describe());
    }
    for (const auto& fn : prog.functions) {
      FunctionSig sig{fn.name, fn.return_type, {}};
      for (const auto& p : fn.params) sig.params.push_back(p.type);
      sigs_.push_back(std::move(sig));
    }
    for (const auto& c : prog.constants) constants_[c.name] = c;

    // Pass 2: bodies.
    for (std::size_t f = 0; f < prog.functions.size(); ++f) {
      pos_ = body_starts[f];
      FunctionDef& fn = prog.functions[f];
      current_ = &fn;
      scopes_.clear();
      scopes_.emplace_back();
      next_slot_ = 0;
      for (auto& param : fn.params) {
        param.slot = next_slot_++;
        scopes_.back()[param.name] = Symbol{param.slot, param.type};
      }
      fn.body = parse_block();
      fn.frame_size = next_slot_;
    }
    prog.entry = static_cast<int>(prog.functions.size()) - 1;
    index_program(prog);
    return prog;
  }

  // Constraint mode: conjunction of comparisons separated by && .
  struct ParsedConjunct {
    ExprPtr lhs;
    CompareOp op;
    ExprPtr rhs;
  };
  std::vector<ParsedConjunct> parse_conjunction(std::vector<std::string>& variables) {
    scopes_.assign(1, {});
    next_slot_ = 0;
    for (const auto& v : opts_.allowed_variables) declare_auto(v);
    std::vector<ParsedConjunct> out;
    if (!peek().kind_is_end()) {
      while (true) {
        ExprPtr lhs = parse_expr();
        auto op = parse_compare_op();
        ExprPtr rhs = parse_expr();
        require_numeric(lhs, "constraint operand");
        require_numeric(rhs, "constraint operand");
        out.push_back({lhs, op, rhs});
        if (accept("&&")) continue;
        break;
      }
    }
    if (!peek().kind_is_end()) {
      throw SyntaxError(peek().pos, "'&&' or end of constraint", peek().describe());
    }
    variables = auto_order_;
    return out;
  }

 private:
  // Token helpers -----------------------------------------------------------
  const Token& tok(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  struct PeekView {
    const Token& t;
    bool kind_is_end() const { return t.kind == TokenKind::End; }
    bool is(std::string_view p) const { return t.is(p); }
    bool is_word(std::string_view w) const { return t.is_word(w); }
    std::string describe() const { return t.describe(); }
    SourcePos pos = t.pos;
  };
  PeekView peek(std::size_t ahead = 0) const { return PeekView{tok(ahead)}; }
  const Token& next() {
    const Token& t = tok();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool accept(std::string_view punct) {
    if (tok().is(punct)) {
      next();
      return true;
    }
    return false;
  }
  const Token& expect(std::string_view punct) {
    if (!tok().is(punct)) {
      throw SyntaxError(tok().pos, "'" + std::string(punct) + "'", tok().describe());
    }
    return next();
  }
  const Token& expect_identifier(std::string_view what) {
    if (tok().kind != TokenKind::Identifier) {
      throw SyntaxError(tok().pos, std::string(what), tok().describe());
    }
    return next();
  }

  ValueType parse_type_word() {
    const Token& t = tok();
    if (!is_type_word(t)) throw SyntaxError(t.pos, "a type", t.describe());
    next();
    if (t.text == "void") return ValueType::Void;
    if (t.text == "int") return ValueType::Int;
    return ValueType::Real;
  }

  void skip_braced_block() {
    if (!tok().is("{")) throw SyntaxError(tok().pos, "'{'", tok().describe());
    int depth = 0;
    do {
      if (tok().kind == TokenKind::End) {
        throw SyntaxError(tok().pos, "'}'", "end of input");
      }
      if (tok().is("{")) ++depth;
      if (tok().is("}")) --depth;
      next();
    } while (depth > 0);
  }

  // Top level -----------------------------------------------------------------
  ConstantDef parse_constant() {
    accept_word("static");
    ConstantDef c;
    c.pos = tok().pos;
    if (!tok().is_word("const")) throw SyntaxError(tok().pos, "'const'", tok().describe());
    next();
    c.type = parse_type_word();
    if (c.type == ValueType::Void) throw Error(ErrorKind::TypeError, c.pos, "void constant");
    c.name = expect_identifier("constant name").text;
    expect("=");
    bool negative = false;
    if (accept("-")) negative = true;
    else accept("+");
    const Token& lit = tok();
    if (lit.kind != TokenKind::IntLiteral && lit.kind != TokenKind::RealLiteral) {
      throw SyntaxError(lit.pos, "numeric literal", lit.describe());
    }
    next();
    c.value = negative ? -lit.value : lit.value;
    c.text = (negative ? "-" : "") + lit.text;
    if (c.type == ValueType::Int && lit.kind == TokenKind::RealLiteral) {
      throw Error(ErrorKind::TypeError, lit.pos, "int constant initialised with a real literal");
    }
    expect(";");
    return c;
  }

  bool accept_word(std::string_view w) {
    if (tok().is_word(w)) {
      next();
      return true;
    }
    return false;
  }

  FunctionDef parse_header() {
    FunctionDef fn;
    fn.pos = tok().pos;
    fn.return_type = parse_type_word();
    if (tok().is("*")) throw Error(ErrorKind::UnsupportedPointerUse, tok().pos, "pointer return type");
    fn.name = expect_identifier("function name").text;
    expect("(");
    std::set<std::string> seen;
    if (!tok().is(")")) {
      if (tok().is_word("void") && tok(1).is(")")) {
        next();
      } else {
        while (true) {
          Param p;
          SourcePos ppos = tok().pos;
          ValueType t = parse_type_word();
          if (t == ValueType::Void) throw Error(ErrorKind::TypeError, ppos, "void parameter");
          int stars = 0;
          while (accept("*")) ++stars;
          if (stars > 0 && t != ValueType::Real) {
            throw Error(ErrorKind::UnsupportedPointerUse, ppos, "only pointers to reals are supported");
          }
          p.type = stars == 0 ? t : (stars == 1 ? ValueType::RealPtr : ValueType::RealPtrPtr);
          p.name = expect_identifier("parameter name").text;
          if (!seen.insert(p.name).second) {
            throw Error(ErrorKind::DuplicateParameter, ppos, "parameter '" + p.name + "' repeated");
          }
          fn.params.push_back(std::move(p));
          if (accept(",")) continue;
          break;
        }
      }
    }
    expect(")");
    return fn;
  }

  // Scopes --------------------------------------------------------------------
  const Symbol* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }
  int declare(const std::string& name, ValueType type, SourcePos pos) {
    if (scopes_.back().count(name)) {
      throw Error(ErrorKind::TypeError, pos, "'" + name + "' redeclared in the same scope");
    }
    int slot = next_slot_++;
    scopes_.back()[name] = Symbol{slot, type};
    return slot;
  }
  const Symbol* declare_auto(const std::string& name) {
    if (const Symbol* existing = lookup(name)) return existing;
    int slot = next_slot_++;
    scopes_.front()[name] = Symbol{slot, ValueType::Real};
    auto_order_.push_back(name);
    return lookup(name);
  }

  // Statements ----------------------------------------------------------------
  StmtPtr parse_block() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Block;
    s->pos = expect("{").pos;
    scopes_.emplace_back();
    while (!tok().is("}")) {
      if (tok().kind == TokenKind::End) throw SyntaxError(tok().pos, "'}'", "end of input");
      s->body.push_back(parse_statement());
    }
    next();
    scopes_.pop_back();
    return s;
  }

  StmtPtr parse_statement() {
    const Token& t = tok();
    if (t.is("{")) return parse_block();
    if (t.is(";")) {
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::Empty;
      s->pos = next().pos;
      return s;
    }
    if (t.is_word("if")) return parse_if();
    if (t.is_word("while")) return parse_while();
    if (t.is_word("return")) return parse_return();
    if (is_type_word(t)) return parse_decl();
    if (t.is("*")) return parse_store();
    if (t.kind == TokenKind::Identifier) {
      if (tok(1).is("(")) {
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::ExprStmt;
        s->pos = t.pos;
        s->value = parse_call(/*statement_context=*/true);
        expect(";");
        return s;
      }
      return parse_assignment();
    }
    throw SyntaxError(t.pos, "a statement", t.describe());
  }

  StmtPtr parse_if() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::If;
    s->pos = next().pos;
    expect("(");
    s->cond = parse_condition(s->pos);
    expect(")");
    s->then_branch = parse_scoped_statement();
    if (accept_word("else")) s->else_branch = parse_scoped_statement();
    return s;
  }

  StmtPtr parse_while() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::While;
    s->pos = next().pos;
    expect("(");
    s->cond = parse_condition(s->pos);
    expect(")");
    s->then_branch = parse_scoped_statement();
    return s;
  }

  StmtPtr parse_scoped_statement() {
    scopes_.emplace_back();
    StmtPtr s = parse_statement();
    scopes_.pop_back();
    return s;
  }

  StmtPtr parse_return() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Return;
    s->pos = next().pos;
    if (!tok().is(";")) {
      s->value = parse_expr();
      require_numeric(s->value, "return value");
      if (current_->return_type == ValueType::Void) {
        throw Error(ErrorKind::TypeError, s->pos, "void function returns a value");
      }
    }
    expect(";");
    return s;
  }

  StmtPtr parse_decl() {
    SourcePos pos = tok().pos;
    ValueType type = parse_type_word();
    if (type == ValueType::Void) throw Error(ErrorKind::TypeError, pos, "void variable");
    if (tok().is("*")) throw Error(ErrorKind::UnsupportedPointerUse, tok().pos, "local pointer variables");
    std::vector<StmtPtr> decls;
    while (true) {
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::Decl;
      s->pos = tok().pos;
      s->type = type;
      s->name = expect_identifier("variable name").text;
      if (accept("=")) {
        s->value = parse_expr();
        require_numeric(s->value, "initializer");
      }
      s->slot = declare(s->name, type, s->pos);
      s->pos = pos;
      decls.push_back(s);
      if (accept(",")) continue;
      break;
    }
    expect(";");
    if (decls.size() == 1) return decls.front();
    // int a, b; becomes a block-free sequence: wrap in an unscoped block.
    auto blk = std::make_shared<Stmt>();
    blk->kind = StmtKind::Block;
    blk->pos = pos;
    blk->body = std::move(decls);
    blk->name = "decls";
    return blk;
  }

  StmtPtr parse_store() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Store;
    s->pos = next().pos;
    const Token& id = expect_identifier("pointer name");
    const Symbol* sym = lookup(id.text);
    if (!sym) throw Error(ErrorKind::UndeclaredIdentifier, id.pos, "'" + id.text + "' is not declared");
    if (!is_pointer(sym->type)) {
      throw Error(ErrorKind::TypeError, id.pos, "'" + id.text + "' is not a pointer");
    }
    s->name = id.text;
    s->slot = sym->slot;
    s->type = sym->type;
    expect("=");
    s->value = parse_expr();
    require_numeric(s->value, "stored value");
    expect(";");
    return s;
  }

  StmtPtr parse_assignment() {
    const Token& id = next();
    const Symbol* sym = lookup(id.text);
    if (!sym) {
      if (constants_.count(id.text)) {
        throw Error(ErrorKind::TypeError, id.pos, "cannot assign to constant '" + id.text + "'");
      }
      throw Error(ErrorKind::UndeclaredIdentifier, id.pos, "'" + id.text + "' is not declared");
    }
    if (is_pointer(sym->type)) {
      throw Error(ErrorKind::UnsupportedPointerUse, id.pos, "assignment to pointer '" + id.text + "'");
    }
    auto s = std::make_shared<Stmt>();
    s->pos = id.pos;
    s->name = id.text;
    s->slot = sym->slot;
    s->type = sym->type;
    if (tok().is("++") || tok().is("--")) {
      s->kind = StmtKind::IncDec;
      s->delta = next().is("++") ? 1 : -1;
      expect(";");
      return s;
    }
    s->kind = StmtKind::Assign;
    const Token& op = tok();
    if (op.is("=")) s->assign_op = AssignOp::Set;
    else if (op.is("+=")) s->assign_op = AssignOp::Add;
    else if (op.is("-=")) s->assign_op = AssignOp::Sub;
    else if (op.is("*=")) s->assign_op = AssignOp::Mul;
    else if (op.is("/=")) s->assign_op = AssignOp::Div;
    else throw SyntaxError(op.pos, "an assignment operator", op.describe());
    next();
    s->value = parse_expr();
    require_numeric(s->value, "assigned value");
    expect(";");
    return s;
  }

  CompareOp parse_compare_op() {
    const Token& t = tok();
    CompareOp op;
    if (t.is("==")) op = CompareOp::Eq;
    else if (t.is("<=")) op = CompareOp::Le;
    else if (t.is("<")) op = CompareOp::Lt;
    else if (t.is("!=")) op = CompareOp::Ne;
    else if (t.is(">=")) op = CompareOp::Ge;
    else if (t.is(">")) op = CompareOp::Gt;
    else throw SyntaxError(t.pos, "a comparison operator", t.describe());
    next();
    return op;
  }

  ConditionPtr parse_condition(SourcePos stmt_pos) {
    auto c = std::make_shared<Condition>();
    c->pos = stmt_pos;
    c->lhs = parse_expr();
    c->op = parse_compare_op();
    c->rhs = parse_expr();
    c->label = next_label_++;
    return c;
  }

  // Expressions -------------------------------------------------------------
  static ExprPtr make_binary(BinaryOp op, ExprPtr l, ExprPtr r, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->binary_op = op;
    e->pos = pos;
    ValueType lt = l->type, rt = r->type;
    if (is_pointer(lt) || is_pointer(rt)) {
      e->type = is_pointer(lt) ? lt : rt;  // pointer arithmetic; rejected when lowering
    } else if (op == BinaryOp::Pow) {
      e->type = ValueType::Real;
    } else if (op == BinaryOp::BitAnd || op == BinaryOp::BitOr || op == BinaryOp::Shl ||
               op == BinaryOp::Shr || op == BinaryOp::Mod) {
      if (lt != ValueType::Int || rt != ValueType::Int) {
        throw Error(ErrorKind::TypeError, pos,
                    "operator '" + std::string(to_string(op)) + "' needs int operands");
      }
      e->type = ValueType::Int;
    } else {
      e->type = (lt == ValueType::Int && rt == ValueType::Int) ? ValueType::Int : ValueType::Real;
    }
    e->args = {std::move(l), std::move(r)};
    return e;
  }

  void require_numeric(const ExprPtr& e, std::string_view what) const {
    if (e->type == ValueType::Void) {
      throw Error(ErrorKind::TypeError, e->pos, std::string(what) + " has no value");
    }
  }

  ExprPtr parse_expr() { return parse_bitor(); }

  ExprPtr parse_bitor() {
    ExprPtr l = parse_bitand();
    while (tok().is("|")) {
      SourcePos p = next().pos;
      l = make_binary(BinaryOp::BitOr, l, parse_bitand(), p);
    }
    return l;
  }
  ExprPtr parse_bitand() {
    ExprPtr l = parse_shift();
    while (tok().is("&")) {
      SourcePos p = next().pos;
      l = make_binary(BinaryOp::BitAnd, l, parse_shift(), p);
    }
    return l;
  }
  ExprPtr parse_shift() {
    ExprPtr l = parse_additive();
    while (tok().is("<<") || tok().is(">>")) {
      bool left = tok().is("<<");
      SourcePos p = next().pos;
      l = make_binary(left ? BinaryOp::Shl : BinaryOp::Shr, l, parse_additive(), p);
    }
    return l;
  }
  ExprPtr parse_additive() {
    ExprPtr l = parse_multiplicative();
    while (tok().is("+") || tok().is("-")) {
      bool add = tok().is("+");
      SourcePos p = next().pos;
      l = make_binary(add ? BinaryOp::Add : BinaryOp::Sub, l, parse_multiplicative(), p);
    }
    return l;
  }
  ExprPtr parse_multiplicative() {
    ExprPtr l = parse_unary();
    while (tok().is("*") || tok().is("/") || tok().is("%")) {
      BinaryOp op = tok().is("*") ? BinaryOp::Mul : tok().is("/") ? BinaryOp::Div : BinaryOp::Mod;
      SourcePos p = next().pos;
      l = make_binary(op, l, parse_unary(), p);
    }
    return l;
  }

  ExprPtr parse_unary() {
    const Token& t = tok();
    if (t.is("-") || t.is("+") || t.is("~")) {
      SourcePos p = next().pos;
      ExprPtr operand = parse_unary();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Unary;
      e->pos = p;
      e->unary_op = t.text == "-" ? UnaryOp::Neg : t.text == "+" ? UnaryOp::Plus : UnaryOp::BitNot;
      if (e->unary_op == UnaryOp::BitNot && operand->type != ValueType::Int) {
        throw Error(ErrorKind::TypeError, p, "operator '~' needs an int operand");
      }
      e->type = operand->type;
      e->args = {std::move(operand)};
      return e;
    }
    if (t.is("(") && is_type_word(tok(1)) && tok(2).is(")")) {
      SourcePos p = next().pos;
      ValueType target = parse_type_word();
      if (target == ValueType::Void) throw Error(ErrorKind::TypeError, p, "cast to void");
      expect(")");
      ExprPtr operand = parse_unary();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Cast;
      e->pos = p;
      e->type = target;
      e->args = {std::move(operand)};
      return e;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (tok().is("^")) {
      SourcePos p = next().pos;
      ExprPtr exponent = parse_unary();  // right associative, allows 2^-x
      return make_binary(BinaryOp::Pow, base, exponent, p);
    }
    return base;
  }

  ExprPtr parse_call(bool statement_context) {
    const Token& id = next();
    expect("(");
    std::vector<ExprPtr> args;
    if (!tok().is(")")) {
      while (true) {
        args.push_back(parse_expr());
        if (accept(",")) continue;
        break;
      }
    }
    expect(")");
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Call;
    e->pos = id.pos;
    e->text = id.text;
    e->call_site = next_call_site_++;
    if (const BuiltinInfo* b = find_builtin(id.text)) {
      if (static_cast<int>(args.size()) != b->arity) {
        throw Error(ErrorKind::ArityMismatch, id.pos,
                    "'" + id.text + "' takes " + std::to_string(b->arity) + " argument(s)");
      }
      for (const auto& a : args) {
        if (!is_numeric(a->type)) {
          throw Error(ErrorKind::TypeError, a->pos, "builtin arguments must be numeric");
        }
      }
      e->function = -1;
      e->builtin = b->id;
      e->type = b->result;
    } else {
      int index = -1;
      for (std::size_t i = 0; i < sigs_.size(); ++i) {
        if (sigs_[i].name == id.text) index = static_cast<int>(i);
      }
      if (index < 0) {
        throw Error(ErrorKind::UndeclaredIdentifier, id.pos, "function '" + id.text + "' is not defined");
      }
      const FunctionSig& sig = sigs_[index];
      if (args.size() != sig.params.size()) {
        throw Error(ErrorKind::ArityMismatch, id.pos,
                    "'" + id.text + "' takes " + std::to_string(sig.params.size()) + " argument(s)");
      }
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (is_pointer(sig.params[i]) || is_pointer(args[i]->type)) {
          throw Error(ErrorKind::UnsupportedPointerUse, args[i]->pos,
                      "pointers cannot be passed to functions");
        }
      }
      e->function = index;
      e->type = sig.return_type;
      if (!statement_context && sig.return_type == ValueType::Void) {
        throw Error(ErrorKind::TypeError, id.pos, "void function '" + id.text + "' used as a value");
      }
    }
    e->args = std::move(args);
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = tok();
    if (t.kind == TokenKind::IntLiteral || t.kind == TokenKind::RealLiteral) {
      next();
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Number;
      e->pos = t.pos;
      e->value = t.value;
      e->text = t.text;
      e->type = t.kind == TokenKind::IntLiteral ? ValueType::Int : ValueType::Real;
      return e;
    }
    if (t.is("(")) {
      next();
      ExprPtr inner = parse_expr();
      expect(")");
      return inner;
    }
    if (t.is("*")) {
      SourcePos p = next().pos;
      const Token& id = expect_identifier("pointer name");
      const Symbol* sym = lookup(id.text);
      if (!sym) throw Error(ErrorKind::UndeclaredIdentifier, id.pos, "'" + id.text + "' is not declared");
      if (!is_pointer(sym->type)) {
        throw Error(ErrorKind::TypeError, id.pos, "'" + id.text + "' is not a pointer");
      }
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Deref;
      e->pos = p;
      e->text = id.text;
      e->slot = sym->slot;
      e->type = sym->type == ValueType::RealPtr ? ValueType::Real : ValueType::RealPtr;
      return e;
    }
    if (t.kind == TokenKind::Identifier) {
      if (tok(1).is("(")) return parse_call(false);
      next();
      auto e = std::make_shared<Expr>();
      e->pos = t.pos;
      e->text = t.text;
      if (const Symbol* sym = lookup(t.text)) {
        e->slot = sym->slot;
        e->type = sym->type;
        e->kind = is_pointer(sym->type) ? ExprKind::PtrRef : ExprKind::Var;
        return e;
      }
      if (auto c = constants_.find(t.text); c != constants_.end()) {
        e->kind = ExprKind::Const;
        e->value = c->second.value;
        e->type = c->second.type;
        return e;
      }
      if (opts_.auto_declare) {
        if (!opts_.allowed_variables.empty()) {
          throw Error(ErrorKind::UnknownVariable, t.pos, "'" + t.text + "' is not a declared variable");
        }
        const Symbol* sym = declare_auto(t.text);
        e->kind = ExprKind::Var;
        e->slot = sym->slot;
        e->type = ValueType::Real;
        return e;
      }
      throw Error(ErrorKind::UndeclaredIdentifier, t.pos, "'" + t.text + "' is not declared");
    }
    throw SyntaxError(t.pos, "an expression", t.describe());
  }

  std::vector<Token> toks_;
  Options opts_;
  std::size_t pos_ = 0;
  std::vector<std::map<std::string, Symbol>> scopes_;
  std::vector<FunctionSig> sigs_;
  std::map<std::string, ConstantDef> constants_;
  std::vector<std::string> auto_order_;
  FunctionDef* current_ = nullptr;
  int next_slot_ = 0;
  int next_label_ = 0;
  int next_call_site_ = 0;
};

}  // namespace detail

// Parses a mini-language translation unit. The entry defaults to the last
// function defined; use Program::with_entry to pick another.
inline Program parse(std::string_view source, std::string file = "<input>") {
  detail::Parser parser(tokenize(source));
  Program p = parser.parse_program();
  p.file = std::move(file);
  return p;
}

}  // namespace mexec
