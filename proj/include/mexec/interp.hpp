// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/distance.hpp"
#include "mexec/error.hpp"
#include "mexec/saturation.hpp"

namespace mexec {

enum class Mode { Coverage, Path, Bva, Sat };
enum class UpdateRule { Assign, Add, Multiply };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Coverage: return "coverage";
    case Mode::Path: return "path";
    case Mode::Bva: return "bva";
    case Mode::Sat: return "sat";
  }
  return "?";
}

// How the representing value r evolves at each instrumentable conditional.
struct RepFunConfig {
  Mode mode = Mode::Coverage;
  double r0 = 1.0;
  UpdateRule update = UpdateRule::Assign;
  double epsilon = kDefaultEpsilon;
  std::vector<BranchId> target_path;  // path mode only

  static RepFunConfig coverage(double eps = kDefaultEpsilon) {
    return {Mode::Coverage, 1.0, UpdateRule::Assign, eps, {}};
  }
  static RepFunConfig path(std::vector<BranchId> target, double eps = kDefaultEpsilon) {
    return {Mode::Path, 0.0, UpdateRule::Add, eps, std::move(target)};
  }
  static RepFunConfig bva(double eps = kDefaultEpsilon) {
    return {Mode::Bva, 1.0, UpdateRule::Multiply, eps, {}};
  }
  // Sum of d(op, a, b) over every instrumentable conditional executed.
  static RepFunConfig sat(double eps = kDefaultEpsilon) {
    return {Mode::Sat, 0.0, UpdateRule::Add, eps, {}};
  }

  void validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidConfig, "epsilon must be positive");
    bool ok = true;
    switch (mode) {
      case Mode::Coverage: ok = r0 == 1.0 && update == UpdateRule::Assign; break;
      case Mode::Path: ok = r0 == 0.0 && update == UpdateRule::Add; break;
      case Mode::Bva: ok = r0 == 1.0 && update == UpdateRule::Multiply; break;
      case Mode::Sat: ok = r0 == 0.0 && update == UpdateRule::Add; break;
    }
    if (!ok) {
      throw Error(ErrorKind::InvalidConfig,
                  std::string("r0/update do not match ") + to_string(mode) + " mode");
    }
  }
};

enum class ExecStatus { Ok, NaNOperand, StepBudgetExceeded, CallDepthExceeded, DivisionByZero };

inline const char* to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::Ok: return "ok";
    case ExecStatus::NaNOperand: return "nan-operand";
    case ExecStatus::StepBudgetExceeded: return "step-budget-exceeded";
    case ExecStatus::CallDepthExceeded: return "call-depth-exceeded";
    case ExecStatus::DivisionByZero: return "division-by-zero";
  }
  return "?";
}

struct ExecOptions {
  long long step_budget = 1000000;
  int max_call_depth = 1000;
  bool record_path = true;
  bool record_coverage = true;
};

struct ExecutionTrace {
  std::vector<BranchId> path;
  std::set<int> covered_lines;
  std::set<int> covered_conditionals;
  std::set<BranchId> covered_branches;
  std::set<int> covered_calls;
  std::vector<std::pair<int, long long>> line_hits;  // (line, count), sorted
  // Last instrumentable conditional executed and the side it took.
  std::optional<BranchId> last_branch;
  double final_r = 0.0;
  long long steps = 0;
  ExecStatus status = ExecStatus::Ok;
};

namespace detail {

inline std::int64_t to_int64(double v) {
  if (std::isnan(v)) return 0;
  if (v >= 9223372036854775807.0) return std::numeric_limits<std::int64_t>::max();
  if (v <= -9223372036854775808.0) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(v);
}

inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

inline std::int64_t hiword(double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(bits >> 32));
}
inline std::int64_t loword(double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  return static_cast<std::uint32_t>(bits & 0xffffffffu);
}
inline double fromwords(std::int64_t hi, std::int64_t lo) {
  std::uint64_t bits = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(hi)) << 32) |
                       static_cast<std::uint32_t>(lo);
  return std::bit_cast<double>(bits);
}

struct Cell {
  double d = 0.0;
  std::int64_t i = 0;
};

class Interpreter {
 public:
  Interpreter(const Program& p, const RepFunConfig& cfg, const std::vector<char>* explored,
              const ExecOptions& opts)
      : p_(p), cfg_(cfg), explored_(explored), opts_(opts) {}

  ExecutionTrace run(const std::vector<double>& inputs) {
    const FunctionDef& fn = p_.entry_function();
    if (inputs.size() != fn.params.size()) {
      throw Error(ErrorKind::ArityMismatch, "entry '" + fn.name + "' takes " +
                                                std::to_string(fn.params.size()) + " input(s), got " +
                                                std::to_string(inputs.size()));
    }
    const int nc = p_.num_conditions();
    branch_hit_.assign(2 * nc, 0);
    if (opts_.record_coverage) {
      call_hit_.assign(p_.call_sites.size(), 0);
    }
    r_ = cfg_.r0;
    stack_.assign(static_cast<std::size_t>(fn.frame_size), Cell{});
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      set_from_real(stack_[fn.params[k].slot], fn.params[k].type, inputs[k]);
    }
    base_ = 0;
    exec(fn.body);

    if (status_ == ExecStatus::Ok && cfg_.mode == Mode::Path && !mismatched_ &&
        matched_ < cfg_.target_path.size()) {
      r_ += 1.0;  // path ended before reaching the whole target
    }
    trace_.final_r = status_ == ExecStatus::Ok ? r_ : kSentinel;
    if (std::isnan(trace_.final_r)) trace_.final_r = kSentinel;
    trace_.status = status_;
    trace_.steps = steps_;
    if (opts_.record_coverage) {
      for (int b = 0; b < 2 * nc; ++b) {
        if (branch_hit_[b]) {
          trace_.covered_branches.insert(BranchId::from_index(b));
          trace_.covered_conditionals.insert(b / 2);
        }
      }
      for (const auto& [line, n] : line_hits_) {
        trace_.covered_lines.insert(line);
        trace_.line_hits.emplace_back(line, n);
      }
      for (std::size_t c = 0; c < call_hit_.size(); ++c) {
        if (call_hit_[c]) trace_.covered_calls.insert(static_cast<int>(c));
      }
    }
    return std::move(trace_);
  }

 private:
  enum class Flow { Normal, Return, Abort };

  bool ok() const { return status_ == ExecStatus::Ok; }
  void fail(ExecStatus s) {
    if (status_ == ExecStatus::Ok) status_ = s;
  }
  bool step() {
    if (++steps_ > opts_.step_budget) {
      fail(ExecStatus::StepBudgetExceeded);
      return false;
    }
    return true;
  }
  void hit_line(int line) {
    if (opts_.record_coverage) ++line_hits_[line];
  }

  Cell& slot(int s) { return stack_[base_ + static_cast<std::size_t>(s)]; }

  static void set_from_real(Cell& c, ValueType t, double v) {
    if (t == ValueType::Int) c.i = to_int64(v);
    else c.d = v;
  }

  // Expressions -------------------------------------------------------------
  double eval_real(const Expr& e) {
    if (e.type == ValueType::Int) return static_cast<double>(eval_int(e));
    switch (e.kind) {
      case ExprKind::Number:
      case ExprKind::Const:
        return e.value;
      case ExprKind::Var:
      case ExprKind::Deref:
        return slot(e.slot).d;
      case ExprKind::PtrRef:
        return 1.0 + e.slot;  // any non-null address
      case ExprKind::Unary: {
        double v = eval_real(*e.args[0]);
        return e.unary_op == UnaryOp::Neg ? -v : v;
      }
      case ExprKind::Binary: {
        double a = eval_real(*e.args[0]);
        double b = eval_real(*e.args[1]);
        switch (e.binary_op) {
          case BinaryOp::Add: return a + b;
          case BinaryOp::Sub: return a - b;
          case BinaryOp::Mul: return a * b;
          case BinaryOp::Div: return a / b;
          case BinaryOp::Pow: return std::pow(a, b);
          default: return std::fmod(a, b);
        }
      }
      case ExprKind::Cast:
        return eval_real(*e.args[0]);
      case ExprKind::Call:
        return call_real(e);
    }
    return 0.0;
  }

  std::int64_t eval_int(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Number:
      case ExprKind::Const:
        return to_int64(e.value);
      case ExprKind::Var:
        return slot(e.slot).i;
      case ExprKind::Unary: {
        std::int64_t v = eval_int(*e.args[0]);
        switch (e.unary_op) {
          case UnaryOp::Neg: return wrap_sub(0, v);
          case UnaryOp::Plus: return v;
          case UnaryOp::BitNot: return ~v;
        }
        return v;
      }
      case ExprKind::Binary: {
        std::int64_t a = eval_int(*e.args[0]);
        std::int64_t b = eval_int(*e.args[1]);
        switch (e.binary_op) {
          case BinaryOp::Add: return wrap_add(a, b);
          case BinaryOp::Sub: return wrap_sub(a, b);
          case BinaryOp::Mul: return wrap_mul(a, b);
          case BinaryOp::Div:
          case BinaryOp::Mod:
            if (b == 0) {
              fail(ExecStatus::DivisionByZero);
              return 0;
            }
            if (b == -1) return e.binary_op == BinaryOp::Div ? wrap_sub(0, a) : 0;
            return e.binary_op == BinaryOp::Div ? a / b : a % b;
          case BinaryOp::BitAnd: return a & b;
          case BinaryOp::BitOr: return a | b;
          case BinaryOp::Shl:
            return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) << (b & 63));
          case BinaryOp::Shr: return a >> (b & 63);
          case BinaryOp::Pow: return to_int64(std::pow(static_cast<double>(a), static_cast<double>(b)));
        }
        return 0;
      }
      case ExprKind::Cast: {
        const Expr& inner = *e.args[0];
        if (inner.type == ValueType::Int) return eval_int(inner);
        return to_int64(eval_real(inner));
      }
      case ExprKind::Call:
        return call_int(e);
      default:
        return to_int64(eval_real(e));
    }
  }

  void mark_call(const Expr& e) {
    if (opts_.record_coverage) call_hit_[e.call_site] = 1;
  }

  double call_real(const Expr& e) {
    mark_call(e);
    if (e.function >= 0) return invoke(e).d;
    double a = eval_real(*e.args[0]);
    switch (e.builtin) {
      case Builtin::Sin: return std::sin(a);
      case Builtin::Cos: return std::cos(a);
      case Builtin::Tan: return std::tan(a);
      case Builtin::Exp: return std::exp(a);
      case Builtin::Log: return std::log(a);
      case Builtin::Sqrt: return std::sqrt(a);
      case Builtin::Fabs: return std::fabs(a);
      case Builtin::Floor: return std::floor(a);
      case Builtin::Pow: return std::pow(a, eval_real(*e.args[1]));
      case Builtin::FromWords:
        return fromwords(eval_int_arg(*e.args[0]), eval_int_arg(*e.args[1]));
      default: return 0.0;
    }
  }

  std::int64_t eval_int_arg(const Expr& e) {
    return e.type == ValueType::Int ? eval_int(e) : to_int64(eval_real(e));
  }

  std::int64_t call_int(const Expr& e) {
    mark_call(e);
    if (e.function >= 0) return invoke(e).i;
    double a = eval_real(*e.args[0]);
    if (e.builtin == Builtin::HiWord) return hiword(a);
    if (e.builtin == Builtin::LoWord) return loword(a);
    return to_int64(a);
  }

  Cell invoke(const Expr& e) {
    const FunctionDef& fn = p_.functions[e.function];
    if (depth_ >= opts_.max_call_depth) {
      fail(ExecStatus::CallDepthExceeded);
      return Cell{};
    }
    std::vector<Cell> frame(static_cast<std::size_t>(fn.frame_size));
    for (std::size_t k = 0; k < e.args.size(); ++k) {
      const Param& prm = fn.params[k];
      const Expr& a = *e.args[k];
      if (prm.type == ValueType::Int) frame[prm.slot].i = eval_int_arg(a);
      else frame[prm.slot].d = eval_real(a);
      if (!ok()) return Cell{};
    }
    std::size_t saved_base = base_;
    std::size_t new_base = stack_.size();
    stack_.insert(stack_.end(), frame.begin(), frame.end());
    base_ = new_base;
    ++depth_;
    Cell saved_ret = ret_;
    ret_ = Cell{};
    const ValueType saved_ret_type = ret_type_;
    ret_type_ = fn.return_type;
    exec(fn.body);
    Cell out = ret_;
    ret_ = saved_ret;
    ret_type_ = saved_ret_type;
    --depth_;
    base_ = saved_base;
    stack_.resize(new_base);
    return out;
  }

  // Conditionals ------------------------------------------------------------
  bool eval_condition(const Condition& c) {
    double a = eval_real(*c.lhs);
    double b = eval_real(*c.rhs);
    if (!ok()) return false;
    const bool taken = compare(c.op, a, b);
    const BranchId bid{c.label, taken};
    branch_hit_[bid.index()] = 1;
    if (opts_.record_path) trace_.path.push_back(bid);
    if (!c.instrumentable) return taken;
    if (std::isnan(a) || std::isnan(b)) {
      fail(ExecStatus::NaNOperand);
      return false;
    }
    trace_.last_branch = bid;
    const double eps = cfg_.epsilon;
    switch (cfg_.mode) {
      case Mode::Coverage:
        r_ = pen(c.label, c.op, a, b, *explored_, r_, eps);
        break;
      case Mode::Path:
        if (mismatched_ || matched_ >= cfg_.target_path.size()) break;
        {
          const BranchId want = cfg_.target_path[matched_];
          if (want.label != c.label) {
            r_ += 1.0;
            mismatched_ = true;
            break;
          }
          r_ += branch_distance(want.taken ? c.op : negate(c.op), a, b, eps);
          ++matched_;
        }
        break;
      case Mode::Bva:
        r_ = guarded_product(r_, branch_distance(CompareOp::Eq, a, b, eps));
        break;
      case Mode::Sat:
        r_ += branch_distance(c.op, a, b, eps);
        break;
    }
    return taken;
  }

  // Statements --------------------------------------------------------------
  Flow exec(const StmtPtr& sp) {
    if (!sp) return Flow::Normal;
    const Stmt& s = *sp;
    switch (s.kind) {
      case StmtKind::Block:
        for (const auto& b : s.body) {
          Flow f = exec(b);
          if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
      case StmtKind::Empty:
        return Flow::Normal;
      case StmtKind::If: {
        if (!step()) return Flow::Abort;
        hit_line(s.pos.line);
        bool taken = eval_condition(*s.cond);
        if (!ok()) return Flow::Abort;
        return exec(taken ? s.then_branch : s.else_branch);
      }
      case StmtKind::While:
        while (true) {
          if (!step()) return Flow::Abort;
          hit_line(s.pos.line);
          bool taken = eval_condition(*s.cond);
          if (!ok()) return Flow::Abort;
          if (!taken) return Flow::Normal;
          Flow f = exec(s.then_branch);
          if (f != Flow::Normal) return f;
        }
      default:
        break;
    }
    if (!step()) return Flow::Abort;
    hit_line(s.pos.line);
    switch (s.kind) {
      case StmtKind::Decl: {
        if (s.type == ValueType::Int) {
          std::int64_t v = s.value ? eval_int_arg(*s.value) : 0;
          slot(s.slot).i = v;
        } else {
          double v = s.value ? eval_real(*s.value) : 0.0;
          slot(s.slot).d = v;
        }
        break;
      }
      case StmtKind::Assign:
      case StmtKind::Store:
        assign(s);
        break;
      case StmtKind::IncDec: {
        Cell& c = slot(s.slot);
        if (s.type == ValueType::Int) c.i = wrap_add(c.i, s.delta);
        else c.d += s.delta;
        break;
      }
      case StmtKind::ExprStmt:
        if (s.value->type == ValueType::Int) eval_int(*s.value);
        else eval_real(*s.value);
        break;
      case StmtKind::Return:
        if (s.value) {
          if (ret_type_ == ValueType::Int) ret_.i = eval_int_arg(*s.value);
          else ret_.d = eval_real(*s.value);
        }
        return ok() ? Flow::Return : Flow::Abort;
      default:
        break;
    }
    return ok() ? Flow::Normal : Flow::Abort;
  }

  void assign(const Stmt& s) {
    if (s.type == ValueType::Int) {
      if (s.value->type == ValueType::Int) {
        std::int64_t v = eval_int(*s.value);
        if (!ok()) return;
        std::int64_t& t = slot(s.slot).i;
        switch (s.assign_op) {
          case AssignOp::Set: t = v; break;
          case AssignOp::Add: t = wrap_add(t, v); break;
          case AssignOp::Sub: t = wrap_sub(t, v); break;
          case AssignOp::Mul: t = wrap_mul(t, v); break;
          case AssignOp::Div:
            if (v == 0) {
              fail(ExecStatus::DivisionByZero);
              return;
            }
            t = v == -1 ? wrap_sub(0, t) : t / v;
            break;
        }
        return;
      }
      double v = eval_real(*s.value);
      if (!ok()) return;
      std::int64_t& t = slot(s.slot).i;
      double cur = static_cast<double>(t);
      t = to_int64(apply(s.assign_op, cur, v));
      return;
    }
    double v = eval_real(*s.value);
    if (!ok()) return;
    double& t = slot(s.slot).d;
    t = apply(s.assign_op, t, v);
  }

  static double apply(AssignOp op, double t, double v) {
    switch (op) {
      case AssignOp::Set: return v;
      case AssignOp::Add: return t + v;
      case AssignOp::Sub: return t - v;
      case AssignOp::Mul: return t * v;
      case AssignOp::Div: return t / v;
    }
    return v;
  }

  const Program& p_;
  const RepFunConfig& cfg_;
  const std::vector<char>* explored_;
  const ExecOptions& opts_;

  std::vector<Cell> stack_;
  std::size_t base_ = 0;
  int depth_ = 0;
  Cell ret_{};
  ValueType ret_type_ = ValueType::Real;
  double r_ = 0.0;
  long long steps_ = 0;
  ExecStatus status_ = ExecStatus::Ok;
  std::size_t matched_ = 0;
  bool mismatched_ = false;
  std::vector<char> branch_hit_;
  std::vector<char> call_hit_;
  std::map<int, long long> line_hits_;
  ExecutionTrace trace_;
};

}  // namespace detail

// Runs the entry function of a prepared program on `inputs`, threading the
// representing value through every instrumentable conditional.
// `saturation` is required in coverage mode and ignored otherwise.
inline ExecutionTrace execute(const Program& p, const std::vector<double>& inputs,
                              const RepFunConfig& cfg, const SaturationState* saturation = nullptr,
                              const ExecOptions& opts = {}) {
  cfg.validate();
  const std::vector<char>* explored = nullptr;
  if (cfg.mode == Mode::Coverage) {
    if (!saturation) throw Error(ErrorKind::InvalidConfig, "coverage mode needs a saturation state");
    explored = &saturation->explored;
  }
  for (const auto& b : cfg.target_path) {
    if (b.label < 0 || b.label >= p.num_conditions()) {
      throw Error(ErrorKind::MalformedPath, "branch " + b.str() + " does not exist");
    }
  }
  detail::Interpreter interp(p, cfg, explored, opts);
  return interp.run(inputs);
}

// Replays the path-mode check: the instrumentable conditionals of `path`
// start with `target`.
inline bool path_has_prefix(const Program& p, const std::vector<BranchId>& path,
                            const std::vector<BranchId>& target) {
  std::size_t k = 0;
  for (BranchId b : path) {
    if (k == target.size()) break;
    if (!p.conditions[b.label].instrumentable) continue;
    if (b != target[k]) return false;
    ++k;
  }
  return k == target.size();
}

}  // namespace mexec
