// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/cfg.hpp"
#include "mexec/error.hpp"
#include "mexec/interp.hpp"
#include "mexec/optimize.hpp"
#include "mexec/sampling.hpp"
#include "mexec/saturation.hpp"
#include "mexec/transform.hpp"

namespace mexec {

struct SearchConfig {
  int n_start = 500;
  MCMCConfig mcmc;
  Box box;
  std::uint64_t seed = 4;
  int infeasible_after = 3;
  double epsilon = kDefaultEpsilon;
  long long step_budget = 1000000;
  bool emit_instrumented = false;

  void validate() const {
    if (n_start < 1) throw Error(ErrorKind::InvalidConfig, "n_start must be positive");
    if (infeasible_after < 1) throw Error(ErrorKind::InvalidConfig, "infeasible_after must be positive");
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidConfig, "epsilon must be positive");
    if (!(mcmc.step_scale > 0.0)) throw Error(ErrorKind::InvalidConfig, "step scale must be positive");
    box.validate();
  }
};

enum class BranchStatus { Saturated, Covered, Infeasible, Uncovered };

inline const char* to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::Saturated: return "saturated";
    case BranchStatus::Covered: return "covered";
    case BranchStatus::Infeasible: return "infeasible";
    case BranchStatus::Uncovered: return "uncovered";
  }
  return "?";
}

inline BranchStatus branch_status(const SaturationState& s, BranchId b) {
  if (s.is_infeasible(b)) return BranchStatus::Infeasible;
  if (s.is_saturated(b)) return BranchStatus::Saturated;
  if (s.is_covered(b)) return BranchStatus::Covered;
  return BranchStatus::Uncovered;
}

// One basinhopping run from one starting point.
struct StartRecord {
  Vec start;
  Vec x;
  double value = 0.0;
  bool admitted = false;
  long long evals = 0;
};

struct TestSuiteResult {
  std::shared_ptr<const Program> program;  // prepared program
  std::shared_ptr<const Cfg> cfg;
  std::vector<Vec> inputs;
  std::vector<ExecutionTrace> traces;  // replay of each admitted input
  SaturationState state;
  // Explored set each minimization run saw (the representing function).
  std::vector<std::vector<char>> explored_history;
  // Branch coverage (percent of tracked branches) after each run.
  std::vector<double> coverage_history;
  std::vector<StartRecord> starts;
  std::vector<BranchId> deemed_infeasible;  // in the order they were marked
  bool goal = false;
  long long evals = 0;
  double wall_time = 0.0;
};

namespace detail {

inline ExecOptions fast_exec(const SearchConfig& cfg) {
  ExecOptions o;
  o.step_budget = cfg.step_budget;
  o.record_path = false;
  o.record_coverage = false;
  return o;
}

inline ExecOptions full_exec(const SearchConfig& cfg) {
  ExecOptions o;
  o.step_budget = cfg.step_budget;
  return o;
}

inline MCMCConfig run_mcmc(const SearchConfig& cfg, std::uint64_t seed) {
  MCMCConfig m = cfg.mcmc;
  m.seed = seed;
  m.box = cfg.box;
  m.local.stop_at = 0.0;
  return m;
}

inline bool stop_at_zero(const BasinStep& s) { return s.f_best == 0.0; }

inline double tracked_branch_pct(const SaturationState& s) {
  const Cfg& g = *s.cfg;
  int total = 0, hit = 0;
  for (int i = 0; i < g.num_branches(); ++i) {
    if (!g.is_tracked(i / 2)) continue;
    ++total;
    hit += s.covered[i] ? 1 : 0;
  }
  return total == 0 ? 100.0 : 100.0 * hit / total;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Deems the branch opposite to the failed run's last conditional
// infeasible. Traces that reached zero, and opposite branches that are
// already covered, leave the state unchanged.
inline SaturationState mark_infeasible(SaturationState s, const ExecutionTrace& failed) {
  if (!(failed.final_r > 0.0) || !failed.last_branch) return s;
  BranchId opp = failed.last_branch->opposite();
  if (!s.cfg->is_tracked(opp.label) || s.is_covered(opp)) return s;
  s.infeasible[opp.index()] = 1;
  recompute_explored(s);
  return s;
}

// Branch coverage by saturation: minimize the coverage-mode representing
// function from fresh starting points, admitting every root found, until
// all tracked branches are explored or the starts run out.
inline TestSuiteResult run_coverage(const Program& source, const SearchConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto prog = std::make_shared<const Program>(prepare(source));
  const Program& p = *prog;
  auto graph = std::make_shared<const Cfg>(build_cfg(p));

  TestSuiteResult res;
  res.program = prog;
  res.cfg = graph;
  res.state = make_saturation_state(graph);
  const std::size_t arity = p.entry_function().params.size();
  const RepFunConfig rep = RepFunConfig::coverage(cfg.epsilon);
  const ExecOptions fast = detail::fast_exec(cfg);
  const ExecOptions full = detail::full_exec(cfg);

  auto admit = [&](const Vec& x, ExecutionTrace trace) {
    res.state = update_saturation(std::move(res.state), trace.covered_branches);
    res.inputs.push_back(x);
    res.traces.push_back(std::move(trace));
  };

  if (graph->num_tracked_conditions() == 0) {
    std::mt19937_64 rng(derive_seed(cfg.seed, 0));
    Vec x = cfg.box.clamp(sample_start(arity, cfg.box, rng));
    res.explored_history.push_back(res.state.explored);
    ExecutionTrace t = execute(p, x, rep, &res.state, full);
    res.starts.push_back({x, x, t.final_r, true, 1});
    admit(x, std::move(t));
    res.coverage_history.push_back(100.0);
    res.goal = true;
    res.evals = 1;
    res.wall_time = detail::seconds_since(t0);
    return res;
  }

  std::optional<BranchId> fail_key;
  int fail_count = 0;
  for (int s = 0; s < cfg.n_start; ++s) {
    if (goal_reached(res.state)) break;
    const SaturationState snapshot = res.state;
    res.explored_history.push_back(snapshot.explored);

    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(2 * s)));
    Vec x0 = sample_start(arity, cfg.box, rng);
    Objective f(static_cast<int>(arity), [&](const Vec& x) {
      return execute(p, x, rep, &snapshot, fast).final_r;
    });
    BasinResult bh = basinhopping(f, x0, detail::run_mcmc(cfg, derive_seed(cfg.seed, 2 * s + 1)),
                                  detail::stop_at_zero);
    res.evals += bh.evals;

    ExecutionTrace trace = execute(p, bh.x, rep, &snapshot, full);
    const bool ok = trace.status == ExecStatus::Ok && trace.final_r == 0.0;
    res.starts.push_back({x0, bh.x, trace.final_r, ok, bh.evals});
    if (ok) {
      admit(bh.x, std::move(trace));
      fail_key.reset();
      fail_count = 0;
    } else if (trace.last_branch) {
      if (fail_key && *fail_key == *trace.last_branch) {
        ++fail_count;
      } else {
        fail_key = trace.last_branch;
        fail_count = 1;
      }
      if (fail_count >= cfg.infeasible_after) {
        SaturationState next = mark_infeasible(res.state, trace);
        BranchId opp = trace.last_branch->opposite();
        if (next.is_infeasible(opp) && !res.state.is_infeasible(opp)) {
          res.deemed_infeasible.push_back(opp);
        }
        res.state = std::move(next);
        fail_key.reset();
        fail_count = 0;
      }
    } else {
      fail_key.reset();
      fail_count = 0;
    }
    res.coverage_history.push_back(detail::tracked_branch_pct(res.state));
  }
  res.goal = goal_reached(res.state);
  res.wall_time = detail::seconds_since(t0);
  return res;
}

// Checks that `target` names tracked branches in an order the CFG allows.
inline void validate_path(const Program& p, const Cfg& g, const std::vector<BranchId>& target) {
  for (std::size_t k = 0; k < target.size(); ++k) {
    const BranchId b = target[k];
    if (b.label < 0 || b.label >= g.num_conditions) {
      throw Error(ErrorKind::MalformedPath, "branch " + b.str() + " does not exist");
    }
    if (!g.is_tracked(b.label)) {
      throw Error(ErrorKind::MalformedPath, "conditional " + std::to_string(b.label) +
                                                " is outside '" + p.entry_function().name +
                                                "' or not instrumentable");
    }
    const bool reachable = k == 0 ? static_cast<bool>(g.reachable_from_entry[b.label])
                                  : g.is_descendant(target[k - 1], BranchId{b.label, true});
    if (!reachable) {
      throw Error(ErrorKind::MalformedPath, "branch " + b.str() + " cannot follow " +
                                                (k == 0 ? std::string("the entry") : target[k - 1].str()));
    }
  }
}

struct PathResult {
  bool found = false;
  Vec x;
  double value = 0.0;  // best representing value seen
  ExecutionTrace trace;
  int starts_used = 0;
  long long evals = 0;
  double wall_time = 0.0;
};

// Path reachability: minimize sum of distances toward each target branch.
// A root is reported only after replay confirms the executed path.
inline PathResult run_path(const Program& source, const std::vector<BranchId>& target,
                           const SearchConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Program p = prepare(source);
  const Cfg g = build_cfg(p);
  validate_path(p, g, target);
  const std::size_t arity = p.entry_function().params.size();
  const RepFunConfig rep = RepFunConfig::path(target, cfg.epsilon);
  const ExecOptions fast = detail::fast_exec(cfg);

  PathResult res;
  res.value = kSentinel;
  for (int s = 0; s < cfg.n_start; ++s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(2 * s)));
    Vec x0 = sample_start(arity, cfg.box, rng);
    Objective f(static_cast<int>(arity), [&](const Vec& x) { return execute(p, x, rep, nullptr, fast).final_r; });
    BasinResult bh = basinhopping(f, x0, detail::run_mcmc(cfg, derive_seed(cfg.seed, 2 * s + 1)),
                                  detail::stop_at_zero);
    res.evals += bh.evals;
    res.starts_used = s + 1;
    if (bh.value < res.value) {
      res.value = bh.value;
      res.x = bh.x;
    }
    if (bh.value == 0.0) {
      ExecutionTrace t = execute(p, bh.x, rep, nullptr, detail::full_exec(cfg));
      if (t.final_r == 0.0 && path_has_prefix(p, t.path, target)) {
        res.found = true;
        res.x = bh.x;
        res.value = 0.0;
        res.trace = std::move(t);
        break;
      }
    }
  }
  res.wall_time = detail::seconds_since(t0);
  return res;
}

struct BvaResult {
  std::vector<Vec> inputs;
  std::vector<ExecutionTrace> traces;
  int starts_used = 0;
  long long evals = 0;
  double wall_time = 0.0;
};

// Boundary value analysis: every root of the product of d(==) over the
// executed conditionals hits some a == b. Distinct roots are collected.
inline BvaResult run_bva(const Program& source, const SearchConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Program p = prepare(source);
  const std::size_t arity = p.entry_function().params.size();
  const RepFunConfig rep = RepFunConfig::bva(cfg.epsilon);
  const ExecOptions fast = detail::fast_exec(cfg);

  BvaResult res;
  for (int s = 0; s < cfg.n_start; ++s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(2 * s)));
    Vec x0 = sample_start(arity, cfg.box, rng);
    Objective f(static_cast<int>(arity), [&](const Vec& x) { return execute(p, x, rep, nullptr, fast).final_r; });
    BasinResult bh = basinhopping(f, x0, detail::run_mcmc(cfg, derive_seed(cfg.seed, 2 * s + 1)),
                                  detail::stop_at_zero);
    res.evals += bh.evals;
    res.starts_used = s + 1;
    if (bh.value != 0.0) continue;
    if (std::find(res.inputs.begin(), res.inputs.end(), bh.x) != res.inputs.end()) continue;
    ExecutionTrace t = execute(p, bh.x, rep, nullptr, detail::full_exec(cfg));
    if (t.final_r != 0.0) continue;
    res.inputs.push_back(bh.x);
    res.traces.push_back(std::move(t));
  }
  res.wall_time = detail::seconds_since(t0);
  return res;
}

}  // namespace mexec
