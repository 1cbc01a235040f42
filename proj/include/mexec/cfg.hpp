// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <string_view>
#include <vector>

#include "mexec/ast.hpp"
#include "mexec/error.hpp"

namespace mexec {

enum class NodeKind { Entry, Exit, Statement, Conditional };

struct CfgNode {
  NodeKind kind = NodeKind::Statement;
  int function = -1;
  int line = 0;
  int label = -1;                // Conditional
  std::vector<int> succ;         // Statement: fallthrough; Conditional: {true, false}
  std::vector<int> callees;      // user functions invoked while evaluating this node
};

// Statement-level control-flow graph of every function in scope of an entry
// function, with the static descendant relation over branches.
struct Cfg {
  std::vector<CfgNode> nodes;
  std::vector<int> function_entry;  // node index per function, -1 if out of scope
  std::vector<int> function_exit;
  int entry_function = -1;
  int num_conditions = 0;

  std::vector<char> function_in_scope;
  // Per label: conditional node, owning function, whether tracked.
  std::vector<int> cond_node;
  std::vector<char> tracked;  // in scope and instrumentable
  // descendant[b.index()] = sorted branch indices.
  std::vector<std::vector<int>> descendant;
  // Labels reachable from the entry function's entry node.
  std::vector<char> reachable_from_entry;

  int num_branches() const { return 2 * num_conditions; }
  bool is_tracked(int label) const { return label >= 0 && label < num_conditions && tracked[label]; }
  int num_tracked_conditions() const {
    return static_cast<int>(std::count(tracked.begin(), tracked.end(), 1));
  }
  bool is_descendant(BranchId of, BranchId b) const {
    const auto& d = descendant[of.index()];
    return std::binary_search(d.begin(), d.end(), b.index());
  }
  std::vector<BranchId> descendants(BranchId b) const {
    std::vector<BranchId> out;
    for (int i : descendant[b.index()]) out.push_back(BranchId::from_index(i));
    return out;
  }
};

namespace detail {

inline void collect_callees(const ExprPtr& e, std::vector<int>& out) {
  if (!e) return;
  for (const auto& a : e->args) collect_callees(a, out);
  if (e->kind == ExprKind::Call && e->function >= 0) out.push_back(e->function);
}

class CfgBuilder {
 public:
  CfgBuilder(const Program& p, Cfg& g) : p_(p), g_(g) {}

  void build_function(int f) {
    int entry = add(NodeKind::Entry, f, p_.functions[f].pos.line);
    int exit = add(NodeKind::Exit, f, p_.functions[f].pos.line);
    g_.function_entry[f] = entry;
    g_.function_exit[f] = exit;
    fn_ = f;
    exit_ = exit;
    std::vector<int> open = lower(p_.functions[f].body, {entry});
    for (int n : open) link(n, exit);
  }

 private:
  int add(NodeKind k, int f, int line) {
    CfgNode n;
    n.kind = k;
    n.function = f;
    n.line = line;
    g_.nodes.push_back(std::move(n));
    return static_cast<int>(g_.nodes.size()) - 1;
  }
  void link(int from, int to) { g_.nodes[from].succ.push_back(to); }
  void link_all(const std::vector<int>& from, int to) {
    for (int n : from) link(n, to);
  }

  // Lowers `s` with incoming dangling nodes `in`; returns the dangling exits.
  std::vector<int> lower(const StmtPtr& s, std::vector<int> in) {
    if (!s) return in;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& b : s->body) in = lower(b, std::move(in));
        return in;
      case StmtKind::Empty:
        return in;
      case StmtKind::If: {
        int c = cond_node(*s);
        link_all(in, c);
        // succ[0] is the true edge, succ[1] the false edge.
        int t = add(NodeKind::Statement, fn_, s->pos.line);
        int e = add(NodeKind::Statement, fn_, s->pos.line);
        link(c, t);
        link(c, e);
        std::vector<int> out = lower(s->then_branch, {t});
        std::vector<int> out_else = lower(s->else_branch, {e});
        out.insert(out.end(), out_else.begin(), out_else.end());
        return out;
      }
      case StmtKind::While: {
        int c = cond_node(*s);
        link_all(in, c);
        int t = add(NodeKind::Statement, fn_, s->pos.line);
        int e = add(NodeKind::Statement, fn_, s->pos.line);
        link(c, t);
        link(c, e);
        std::vector<int> body_out = lower(s->then_branch, {t});
        link_all(body_out, c);
        return {e};
      }
      case StmtKind::Return: {
        int n = add(NodeKind::Statement, fn_, s->pos.line);
        collect_callees(s->value, g_.nodes[n].callees);
        link_all(in, n);
        link(n, exit_);
        return {};
      }
      default: {
        int n = add(NodeKind::Statement, fn_, s->pos.line);
        collect_callees(s->value, g_.nodes[n].callees);
        link_all(in, n);
        return {n};
      }
    }
  }

  int cond_node(const Stmt& s) {
    int c = add(NodeKind::Conditional, fn_, s.pos.line);
    g_.nodes[c].label = s.cond->label;
    collect_callees(s.cond->lhs, g_.nodes[c].callees);
    collect_callees(s.cond->rhs, g_.nodes[c].callees);
    g_.cond_node[s.cond->label] = c;
    return c;
  }

  const Program& p_;
  Cfg& g_;
  int fn_ = -1;
  int exit_ = -1;
};

}  // namespace detail

// Builds the interprocedural CFG for `entry` (every user function it can
// reach) and the descendant relation. A branch edge's descendants are both
// branches of every conditional reachable from the edge target: through
// callees it enters, and through the return sites of its own function when
// control leaves it. Loops therefore make inner branches self-descendant.
inline Cfg build_cfg(const Program& p, std::string_view entry) {
  int ef = p.find_function(entry);
  if (ef < 0) {
    throw Error(ErrorKind::UnknownFunction, "no function named '" + std::string(entry) + "'");
  }
  const int nf = static_cast<int>(p.functions.size());
  Cfg g;
  g.entry_function = ef;
  g.num_conditions = p.num_conditions();
  g.function_entry.assign(nf, -1);
  g.function_exit.assign(nf, -1);
  g.function_in_scope.assign(nf, 0);
  g.cond_node.assign(g.num_conditions, -1);
  g.tracked.assign(g.num_conditions, 0);
  g.descendant.assign(g.num_branches(), {});
  g.reachable_from_entry.assign(g.num_conditions, 0);

  detail::CfgBuilder builder(p, g);
  for (int f = 0; f < nf; ++f) builder.build_function(f);

  // Scope: call-graph closure from the entry function.
  std::vector<std::set<int>> calls(nf);
  for (const auto& n : g.nodes) {
    for (int c : n.callees) calls[n.function].insert(c);
  }
  std::deque<int> work{ef};
  g.function_in_scope[ef] = 1;
  while (!work.empty()) {
    int f = work.front();
    work.pop_front();
    for (int c : calls[f]) {
      if (!g.function_in_scope[c]) {
        g.function_in_scope[c] = 1;
        work.push_back(c);
      }
    }
  }
  for (int l = 0; l < g.num_conditions; ++l) {
    const auto& info = p.conditions[l];
    g.tracked[l] = g.function_in_scope[info.function] && info.instrumentable;
  }

  // Return sites: for each callee, the nodes whose successors continue after
  // a call to it.
  std::vector<std::vector<int>> return_sites(nf);
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
    const auto& n = g.nodes[i];
    if (!g.function_in_scope[n.function]) continue;
    for (int c : n.callees) return_sites[c].push_back(i);
  }

  // Labels of every conditional a call to f may execute (f and its callees).
  std::vector<std::vector<char>> body_labels(nf, std::vector<char>(g.num_conditions, 0));
  for (int f = 0; f < nf; ++f) {
    std::vector<char> seen_fn(nf, 0);
    std::deque<int> q{f};
    seen_fn[f] = 1;
    while (!q.empty()) {
      int h = q.front();
      q.pop_front();
      for (int l = 0; l < g.num_conditions; ++l) {
        if (p.conditions[l].function == h) body_labels[f][l] = 1;
      }
      for (int c : calls[h]) {
        if (!seen_fn[c]) {
          seen_fn[c] = 1;
          q.push_back(c);
        }
      }
    }
  }

  // Reachability from a start node. Arriving at a node runs its callees
  // first; reaching a function exit continues at every return site.
  auto reach = [&](int start) {
    std::vector<char> labels(g.num_conditions, 0);
    std::vector<char> seen(g.nodes.size(), 0);
    std::vector<char> fn_done(nf, 0);
    std::deque<int> q{start};
    seen[start] = 1;
    auto push = [&](int n) {
      if (!seen[n]) {
        seen[n] = 1;
        q.push_back(n);
      }
    };
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      const CfgNode& node = g.nodes[n];
      for (int c : node.callees) {
        for (int l = 0; l < g.num_conditions; ++l) labels[l] |= body_labels[c][l];
      }
      if (node.kind == NodeKind::Conditional) labels[node.label] = 1;
      if (node.kind == NodeKind::Exit && !fn_done[node.function]) {
        fn_done[node.function] = 1;
        for (int site : return_sites[node.function]) {
          for (int s : g.nodes[site].succ) push(s);
        }
      }
      for (int s : node.succ) push(s);
    }
    return labels;
  };

  for (int l = 0; l < g.num_conditions; ++l) {
    int c = g.cond_node[l];
    if (!g.function_in_scope[g.nodes[c].function]) continue;
    for (int side = 0; side < 2; ++side) {
      std::vector<char> labels = reach(g.nodes[c].succ[side]);
      auto& d = g.descendant[2 * l + side];
      for (int m = 0; m < g.num_conditions; ++m) {
        if (labels[m]) {
          d.push_back(2 * m);
          d.push_back(2 * m + 1);
        }
      }
    }
  }
  {
    std::vector<char> labels = reach(g.function_entry[ef]);
    for (int m = 0; m < g.num_conditions; ++m) g.reachable_from_entry[m] = labels[m];
  }
  return g;
}

inline Cfg build_cfg(const Program& p) { return build_cfg(p, p.entry_function().name); }

}  // namespace mexec
