// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mexec/error.hpp"

namespace mexec {

enum class ValueType { Void, Real, Int, RealPtr, RealPtrPtr };

inline const char* to_string(ValueType t) {
  switch (t) {
    case ValueType::Void: return "void";
    case ValueType::Real: return "real";
    case ValueType::Int: return "int";
    case ValueType::RealPtr: return "real*";
    case ValueType::RealPtrPtr: return "real**";
  }
  return "?";
}

inline bool is_numeric(ValueType t) {
  return t == ValueType::Real || t == ValueType::Int;
}

inline bool is_pointer(ValueType t) {
  return t == ValueType::RealPtr || t == ValueType::RealPtrPtr;
}

// The six comparators a condition may use.
enum class CompareOp { Eq, Le, Lt, Ne, Ge, Gt };

inline std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Le: return "<=";
    case CompareOp::Lt: return "<";
    case CompareOp::Ne: return "!=";
    case CompareOp::Ge: return ">=";
    case CompareOp::Gt: return ">";
  }
  return "?";
}

// Logical negation: !(a op b) == (a negate(op) b) for non-NaN operands.
constexpr CompareOp negate(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return CompareOp::Ne;
    case CompareOp::Ne: return CompareOp::Eq;
    case CompareOp::Le: return CompareOp::Gt;
    case CompareOp::Gt: return CompareOp::Le;
    case CompareOp::Lt: return CompareOp::Ge;
    case CompareOp::Ge: return CompareOp::Lt;
  }
  return op;
}

constexpr bool compare(CompareOp op, double a, double b) {
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

inline constexpr CompareOp kAllCompareOps[] = {CompareOp::Eq, CompareOp::Le,
                                               CompareOp::Lt, CompareOp::Ne,
                                               CompareOp::Ge, CompareOp::Gt};

// Branch i_T / i_F of conditional label i. Dense index 2*i (+1 for false).
struct BranchId {
  int label = 0;
  bool taken = true;

  constexpr int index() const { return 2 * label + (taken ? 0 : 1); }
  static constexpr BranchId from_index(int index) {
    return BranchId{index / 2, index % 2 == 0};
  }
  constexpr BranchId opposite() const { return BranchId{label, !taken}; }

  std::string str() const {
    return std::to_string(label) + (taken ? "T" : "F");
  }
  friend constexpr bool operator==(BranchId, BranchId) = default;
  friend constexpr auto operator<=>(BranchId, BranchId) = default;
};

// Parses "3T" / "12F".
inline std::optional<BranchId> parse_branch_id(std::string_view text) {
  if (text.size() < 2) return std::nullopt;
  char side = text.back();
  if (side != 'T' && side != 'F' && side != 't' && side != 'f') {
    return std::nullopt;
  }
  int label = 0;
  for (char c : text.substr(0, text.size() - 1)) {
    if (c < '0' || c > '9') return std::nullopt;
    label = label * 10 + (c - '0');
    if (label > 100000000) return std::nullopt;
  }
  return BranchId{label, side == 'T' || side == 't'};
}

enum class Builtin {
  Sin, Cos, Tan, Exp, Log, Sqrt, Fabs, Floor, Pow, HiWord, LoWord, FromWords
};

struct BuiltinInfo {
  std::string_view name;
  Builtin id;
  int arity;
  ValueType result;
  // Word-access builtins stand in for C macros and are not call sites.
  bool counts_as_call;
};

inline constexpr BuiltinInfo kBuiltins[] = {
    {"sin", Builtin::Sin, 1, ValueType::Real, true},
    {"cos", Builtin::Cos, 1, ValueType::Real, true},
    {"tan", Builtin::Tan, 1, ValueType::Real, true},
    {"exp", Builtin::Exp, 1, ValueType::Real, true},
    {"log", Builtin::Log, 1, ValueType::Real, true},
    {"sqrt", Builtin::Sqrt, 1, ValueType::Real, true},
    {"fabs", Builtin::Fabs, 1, ValueType::Real, true},
    {"floor", Builtin::Floor, 1, ValueType::Real, true},
    {"pow", Builtin::Pow, 2, ValueType::Real, true},
    {"hiword", Builtin::HiWord, 1, ValueType::Int, false},
    {"loword", Builtin::LoWord, 1, ValueType::Int, false},
    {"fromwords", Builtin::FromWords, 2, ValueType::Real, false},
};

inline const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

inline const BuiltinInfo& builtin_info(Builtin id) {
  for (const auto& b : kBuiltins) {
    if (b.id == id) return b;
  }
  return kBuiltins[0];
}

// ---------------------------------------------------------------------------
// Expressions. Nodes are immutable and shared; rewrites build new spines.

enum class ExprKind {
  Number,   // literal
  Const,    // reference to a top-level constant
  Var,      // local / parameter slot
  Deref,    // *p on a pointer parameter
  PtrRef,   // bare pointer value (only meaningful in comparisons)
  Unary,
  Binary,
  Call,
  Cast,
};

enum class UnaryOp { Neg, Plus, BitNot };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Pow, BitAnd, BitOr, Shl, Shr };

inline std::string_view to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Plus: return "+";
    case UnaryOp::BitNot: return "~";
  }
  return "?";
}

inline std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Pow: return "^";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
  }
  return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Number;
  ValueType type = ValueType::Real;
  SourcePos pos{};

  double value = 0.0;   // Number, Const
  std::string text;     // literal spelling, or identifier / callee name
  int slot = -1;        // Var, Deref, PtrRef
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  // Call: user function index, or builtin when function < 0.
  int function = -1;
  Builtin builtin = Builtin::Sin;
  int call_site = -1;
  std::vector<ExprPtr> args;  // operands / call arguments
};

// ---------------------------------------------------------------------------
// Conditions and statements.

struct Condition {
  int label = -1;
  CompareOp op = CompareOp::Eq;
  ExprPtr lhs;
  ExprPtr rhs;
  bool instrumentable = true;
  std::string uninstrumentable_reason;
  SourcePos pos{};
};
using ConditionPtr = std::shared_ptr<const Condition>;

enum class StmtKind { Block, Decl, Assign, IncDec, Store, ExprStmt, If, While, Return, Empty };
enum class AssignOp { Set, Add, Sub, Mul, Div };

inline std::string_view to_string(AssignOp op) {
  switch (op) {
    case AssignOp::Set: return "=";
    case AssignOp::Add: return "+=";
    case AssignOp::Sub: return "-=";
    case AssignOp::Mul: return "*=";
    case AssignOp::Div: return "/=";
  }
  return "?";
}

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  StmtKind kind = StmtKind::Empty;
  SourcePos pos{};

  // Decl / Assign / IncDec / Store target.
  std::string name;
  int slot = -1;
  ValueType type = ValueType::Real;  // declared / target type
  AssignOp assign_op = AssignOp::Set;
  int delta = 0;                     // IncDec: +1 / -1

  ExprPtr value;                     // initializer, rhs, call, return value
  ConditionPtr cond;                 // If / While
  StmtPtr then_branch;               // If then / While body
  StmtPtr else_branch;               // If else (optional)
  std::vector<StmtPtr> body;         // Block
};

struct Param {
  std::string name;
  ValueType type = ValueType::Real;
  int slot = -1;
};

struct FunctionDef {
  std::string name;
  ValueType return_type = ValueType::Real;
  std::vector<Param> params;
  StmtPtr body;
  int frame_size = 0;
  SourcePos pos{};
};

struct ConstantDef {
  std::string name;
  ValueType type = ValueType::Real;
  double value = 0.0;
  std::string text;
  SourcePos pos{};
};

// Side table entry for a conditional statement.
struct ConditionInfo {
  int label = -1;
  int function = -1;
  SourcePos pos{};
  CompareOp op = CompareOp::Eq;
  bool is_loop = false;
  bool instrumentable = true;
  std::string reason;
};

struct CallSiteInfo {
  int id = -1;
  int function = -1;  // enclosing function
  SourcePos pos{};
  std::string callee;
  bool counted = true;
};

struct Program {
  std::vector<ConstantDef> constants;
  std::vector<FunctionDef> functions;
  int entry = -1;
  std::string file = "<input>";

  // Indexed by label / call-site id, rebuilt by every rewrite.
  std::vector<ConditionInfo> conditions;
  std::vector<CallSiteInfo> call_sites;
  // Line of every non-block statement, per function.
  std::vector<std::vector<int>> statement_lines;

  int num_conditions() const { return static_cast<int>(conditions.size()); }
  int num_branches() const { return 2 * num_conditions(); }

  int find_function(std::string_view name) const {
    for (std::size_t i = 0; i < functions.size(); ++i) {
      if (functions[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  const FunctionDef& entry_function() const { return functions.at(entry); }

  // Returns a copy whose entry is `name`; throws UnknownFunction.
  Program with_entry(std::string_view name) const {
    int index = find_function(name);
    if (index < 0) {
      throw Error(ErrorKind::UnknownFunction,
                  "no function named '" + std::string(name) + "'");
    }
    Program copy = *this;
    copy.entry = index;
    return copy;
  }
};

}  // namespace mexec
