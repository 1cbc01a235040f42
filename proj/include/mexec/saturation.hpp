// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/cfg.hpp"
#include "mexec/distance.hpp"

namespace mexec {

// Covered, deemed-infeasible and explored (saturated or infeasible) branch
// sets, indexed by BranchId::index(). Only tracked conditionals count.
struct SaturationState {
  std::shared_ptr<const Cfg> cfg;
  std::vector<char> covered;
  std::vector<char> infeasible;
  std::vector<char> explored;

  bool is_covered(BranchId b) const { return covered[b.index()]; }
  bool is_infeasible(BranchId b) const { return infeasible[b.index()]; }
  bool is_explored(BranchId b) const { return explored[b.index()]; }
  bool is_saturated(BranchId b) const { return explored[b.index()] && covered[b.index()]; }

  std::vector<BranchId> list(const std::vector<char>& set) const {
    std::vector<BranchId> out;
    for (int i = 0; i < static_cast<int>(set.size()); ++i) {
      if (set[i]) out.push_back(BranchId::from_index(i));
    }
    return out;
  }
};

inline SaturationState make_saturation_state(std::shared_ptr<const Cfg> cfg) {
  SaturationState s;
  const int nb = cfg->num_branches();
  s.covered.assign(nb, 0);
  s.infeasible.assign(nb, 0);
  s.explored.assign(nb, 0);
  s.cfg = std::move(cfg);
  return s;
}

// explored = {b in covered | descendants(b) within covered or infeasible}
//            plus infeasible, over tracked branches.
inline void recompute_explored(SaturationState& s) {
  const Cfg& g = *s.cfg;
  const int nb = g.num_branches();
  for (int i = 0; i < nb; ++i) {
    s.explored[i] = 0;
    if (!g.is_tracked(i / 2)) continue;
    if (s.infeasible[i]) {
      s.explored[i] = 1;
      continue;
    }
    if (!s.covered[i]) continue;
    bool all = true;
    for (int d : g.descendant[i]) {
      if (!g.is_tracked(d / 2)) continue;
      if (!s.covered[d] && !s.infeasible[d]) {
        all = false;
        break;
      }
    }
    s.explored[i] = all ? 1 : 0;
  }
}

// Adds a set of newly covered branch indices (from a trace).
template <class BranchRange>
SaturationState update_saturation(SaturationState s, const BranchRange& covered_branches) {
  for (BranchId b : covered_branches) {
    if (b.index() >= static_cast<int>(s.covered.size())) continue;
    s.covered[b.index()] = 1;
    s.infeasible[b.index()] = 0;
  }
  recompute_explored(s);
  return s;
}

// Every tracked branch explored.
inline bool goal_reached(const SaturationState& s) {
  const Cfg& g = *s.cfg;
  for (int i = 0; i < g.num_branches(); ++i) {
    if (g.is_tracked(i / 2) && !s.explored[i]) return false;
  }
  return true;
}

// Penalty at conditional `label` evaluating `a op b`, given the explored
// snapshot (indexed by branch) and the current representing value.
inline double pen(int label, CompareOp op, double a, double b, const std::vector<char>& explored,
                  double r_current, double eps = kDefaultEpsilon) {
  const bool t = explored[2 * label];
  const bool f = explored[2 * label + 1];
  if (!t && !f) return 0.0;
  if (!t) return branch_distance(op, a, b, eps);
  if (!f) return branch_distance(negate(op), a, b, eps);
  return r_current;
}

inline double pen(int label, CompareOp op, double a, double b, const SaturationState& s,
                  double r_current, double eps = kDefaultEpsilon) {
  return pen(label, op, a, b, s.explored, r_current, eps);
}

}  // namespace mexec
