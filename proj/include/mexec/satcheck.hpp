// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/driver.hpp"
#include "mexec/error.hpp"
#include "mexec/interp.hpp"
#include "mexec/lexer.hpp"
#include "mexec/optimize.hpp"
#include "mexec/parser.hpp"
#include "mexec/sampling.hpp"
#include "mexec/transform.hpp"

namespace mexec {

struct Conjunct {
  ExprPtr lhs;
  CompareOp op = CompareOp::Eq;
  ExprPtr rhs;
};

// A conjunction of comparisons over named real variables. Variable i lives
// in slot i.
struct Constraint {
  std::vector<Conjunct> conjuncts;
  std::vector<std::string> variables;
};

// Parses `e1 op e2 && e3 op e4 ...` with the mini-language expression
// grammar. Variables are collected in order of first use unless
// `variables` fixes them, in which case other names raise UnknownVariable.
inline Constraint parse_constraint(std::string_view text, std::vector<std::string> variables = {}) {
  detail::Parser::Options opts;
  opts.auto_declare = true;
  opts.allowed_variables = variables;
  detail::Parser parser(tokenize(text), opts);
  Constraint c;
  for (auto& pc : parser.parse_conjunction(c.variables)) {
    c.conjuncts.push_back({pc.lhs, pc.op, pc.rhs});
  }
  return c;
}

// Wraps the constraint as a one-function program whose conditionals are the
// conjuncts in order, so the interpreter evaluates them.
inline Program constraint_program(const Constraint& c) {
  Program p;
  p.file = "<constraint>";
  FunctionDef fn;
  fn.name = "constraint";
  fn.return_type = ValueType::Void;
  for (std::size_t i = 0; i < c.variables.size(); ++i) {
    fn.params.push_back({c.variables[i], ValueType::Real, static_cast<int>(i)});
  }
  fn.frame_size = static_cast<int>(c.variables.size());
  auto body = std::make_shared<Stmt>();
  body->kind = StmtKind::Block;
  int label = 0;
  for (const auto& cj : c.conjuncts) {
    if (!cj.lhs || !cj.rhs) throw Error(ErrorKind::NonNumericExpression, "empty conjunct operand");
    auto cond = std::make_shared<Condition>();
    cond->label = label++;
    cond->op = cj.op;
    cond->lhs = cj.lhs;
    cond->rhs = cj.rhs;
    cond->pos = cj.lhs->pos;
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::If;
    s->pos = cj.lhs->pos;
    s->cond = cond;
    auto empty = std::make_shared<Stmt>();
    empty->kind = StmtKind::Empty;
    s->then_branch = empty;
    body->body.push_back(s);
  }
  fn.body = body;
  p.functions.push_back(std::move(fn));
  p.entry = 0;
  index_program(p);
  Program out = promote_integers(p);
  for (const auto& info : out.conditions) {
    if (!info.instrumentable) {
      throw Error(ErrorKind::NonNumericExpression,
                  "conjunct " + std::to_string(info.label) + " does not compare numbers");
    }
  }
  return out;
}

// Objective = sum over conjuncts of d_eps(op, lhs(x), rhs(x)).
inline Objective compile_constraint(const Constraint& c, double eps = kDefaultEpsilon) {
  auto prog = std::make_shared<const Program>(constraint_program(c));
  const RepFunConfig rep = RepFunConfig::sat(eps);
  ExecOptions opts;
  opts.record_path = false;
  opts.record_coverage = false;
  return Objective(static_cast<int>(c.variables.size()), [prog, rep, opts](const Vec& x) {
    return execute(*prog, x, rep, nullptr, opts).final_r;
  });
}

// Conjunct-by-conjunct replay at x.
inline bool satisfies(const Constraint& c, const Vec& x) {
  const Program p = constraint_program(c);
  ExecOptions opts;
  const ExecutionTrace t = execute(p, x, RepFunConfig::sat(), nullptr, opts);
  if (t.status != ExecStatus::Ok || t.path.size() != c.conjuncts.size()) return false;
  for (BranchId b : t.path) {
    if (!b.taken) return false;
  }
  return true;
}

enum class Verdict { Sat, Unknown };

inline const char* to_string(Verdict v) { return v == Verdict::Sat ? "sat" : "unknown"; }

struct SatResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Vec> model;
  double residual = 0.0;
  Vec best;  // point attaining the residual
  int starts_used = 0;
  long long evals = 0;
  double wall_time = 0.0;
};

// Minimizes the compiled objective over the box (a hard constraint: points
// are clamped before evaluation). A zero that survives replay is a model;
// anything else is "unknown" with the lowest residual seen. Later starts
// replace the residual only when they beat it by more than ftol.
inline SatResult check_sat(const Constraint& c, const SearchConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Objective raw = compile_constraint(c, cfg.epsilon);
  const std::size_t arity = c.variables.size();
  const Box box = cfg.box;
  Objective f(static_cast<int>(arity), [&](const Vec& x) { return raw(box.clamp(x)); });

  SatResult res;
  bool have = false;
  for (int s = 0; s < cfg.n_start; ++s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(2 * s)));
    Vec x0 = box.clamp(sample_start(arity, box, rng));
    BasinResult bh = basinhopping(f, x0, detail::run_mcmc(cfg, derive_seed(cfg.seed, 2 * s + 1)),
                                  detail::stop_at_zero);
    res.starts_used = s + 1;
    Vec x = box.clamp(bh.x);
    if (!have || significantly_better(bh.value, res.residual, cfg.mcmc.local.ftol)) {
      res.residual = bh.value;
      res.best = x;
      have = true;
    }
    if (bh.value == 0.0 && satisfies(c, x)) {
      res.verdict = Verdict::Sat;
      res.model = x;
      res.residual = 0.0;
      res.best = x;
      break;
    }
    if (arity == 0) break;
  }
  res.evals = f.evals();
  res.wall_time = detail::seconds_since(t0);
  return res;
}

}  // namespace mexec
