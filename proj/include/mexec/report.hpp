// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mexec/driver.hpp"

namespace mexec {

inline constexpr const char* kReportSchema = "mexec/1";

struct BranchReport {
  std::string id;  // "3T"
  int line = 0;
  BranchStatus status = BranchStatus::Uncovered;
  bool operator==(const BranchReport&) const = default;
};

struct UninstrumentedReport {
  int label = 0;
  int line = 0;
  std::string reason;
  bool operator==(const UninstrumentedReport&) const = default;
};

// Gcov-style summary of a coverage run.
struct CoverageReport {
  std::string schema = kReportSchema;
  std::string file;
  std::string entry;

  double line_pct = 0.0;
  double condition_pct = 0.0;
  double branch_pct = 0.0;
  double optimal_branch_pct = 0.0;   // deemed-infeasible branches left out
  std::optional<double> call_pct;    // n/a without call sites

  int lines_total = 0, lines_covered = 0;
  int conditions_total = 0, conditions_covered = 0;
  int branches_total = 0, branches_covered = 0, branches_infeasible = 0;
  int calls_total = 0, calls_covered = 0;

  std::vector<std::pair<int, long long>> line_hits;  // executable lines only
  std::vector<BranchReport> branches;
  std::vector<UninstrumentedReport> uninstrumentable;
  std::vector<Vec> inputs;

  int starts_used = 0;
  long long evals = 0;
  bool goal_reached = false;
  double wall_time = 0.0;

  bool operator==(const CoverageReport&) const = default;
};

inline double percent(int num, int den) { return den == 0 ? 100.0 : 100.0 * num / den; }

inline CoverageReport coverage_report(const TestSuiteResult& r) {
  const Program& p = *r.program;
  const Cfg& g = *r.cfg;
  CoverageReport rep;
  rep.file = p.file;
  rep.entry = p.entry_function().name;

  std::set<int> exec_lines;
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    if (!g.function_in_scope[f]) continue;
    exec_lines.insert(p.statement_lines[f].begin(), p.statement_lines[f].end());
  }
  std::map<int, long long> hits;
  for (int line : exec_lines) hits[line] = 0;
  std::set<int> conds_hit, calls_hit;
  for (const auto& t : r.traces) {
    for (const auto& [line, n] : t.line_hits) {
      if (hits.count(line)) hits[line] += n;
    }
    conds_hit.insert(t.covered_conditionals.begin(), t.covered_conditionals.end());
    calls_hit.insert(t.covered_calls.begin(), t.covered_calls.end());
  }
  rep.lines_total = static_cast<int>(exec_lines.size());
  for (const auto& [line, n] : hits) {
    rep.line_hits.emplace_back(line, n);
    if (n > 0) ++rep.lines_covered;
  }

  for (int l = 0; l < g.num_conditions; ++l) {
    const auto& info = p.conditions[l];
    if (!g.function_in_scope[info.function]) continue;
    if (!info.instrumentable) {
      rep.uninstrumentable.push_back({l, info.pos.line, info.reason});
      continue;
    }
    ++rep.conditions_total;
    if (conds_hit.count(l)) ++rep.conditions_covered;
    for (bool taken : {true, false}) {
      BranchId b{l, taken};
      BranchStatus st = branch_status(r.state, b);
      ++rep.branches_total;
      if (r.state.is_covered(b)) ++rep.branches_covered;
      if (st == BranchStatus::Infeasible) ++rep.branches_infeasible;
      rep.branches.push_back({b.str(), info.pos.line, st});
    }
  }
  for (const auto& cs : p.call_sites) {
    if (!cs.counted || !g.function_in_scope[cs.function]) continue;
    ++rep.calls_total;
    if (calls_hit.count(cs.id)) ++rep.calls_covered;
  }

  rep.line_pct = percent(rep.lines_covered, rep.lines_total);
  rep.condition_pct = percent(rep.conditions_covered, rep.conditions_total);
  rep.branch_pct = percent(rep.branches_covered, rep.branches_total);
  rep.optimal_branch_pct = percent(rep.branches_covered, rep.branches_total - rep.branches_infeasible);
  if (rep.calls_total > 0) rep.call_pct = percent(rep.calls_covered, rep.calls_total);

  rep.inputs = r.inputs;
  rep.starts_used = static_cast<int>(r.starts.size());
  rep.evals = r.evals;
  rep.goal_reached = r.goal;
  rep.wall_time = r.wall_time;
  return rep;
}

inline BranchStatus branch_status_from_string(const std::string& s) {
  if (s == "saturated") return BranchStatus::Saturated;
  if (s == "covered") return BranchStatus::Covered;
  if (s == "infeasible") return BranchStatus::Infeasible;
  return BranchStatus::Uncovered;
}

inline void to_json(nlohmann::json& j, const CoverageReport& r) {
  using nlohmann::json;
  json branches = json::array();
  for (const auto& b : r.branches) {
    branches.push_back({{"id", b.id}, {"line", b.line}, {"status", to_string(b.status)}});
  }
  json unins = json::array();
  for (const auto& u : r.uninstrumentable) {
    unins.push_back({{"label", u.label}, {"line", u.line}, {"reason", u.reason}});
  }
  json lines = json::array();
  for (const auto& [line, n] : r.line_hits) lines.push_back({{"line", line}, {"hits", n}});
  j = json{{"schema", r.schema},
           {"file", r.file},
           {"entry", r.entry},
           {"mode", "cover"},
           {"line_pct", r.line_pct},
           {"condition_pct", r.condition_pct},
           {"branch_pct", r.branch_pct},
           {"optimal_branch_pct", r.optimal_branch_pct},
           {"call_pct", r.call_pct ? json(*r.call_pct) : json("n/a")},
           {"lines", {{"total", r.lines_total}, {"covered", r.lines_covered}}},
           {"conditions", {{"total", r.conditions_total}, {"covered", r.conditions_covered}}},
           {"branch_counts",
            {{"total", r.branches_total}, {"covered", r.branches_covered}, {"infeasible", r.branches_infeasible}}},
           {"calls", {{"total", r.calls_total}, {"covered", r.calls_covered}}},
           {"line_hits", lines},
           {"branches", branches},
           {"uninstrumentable", unins},
           {"inputs", r.inputs},
           {"starts_used", r.starts_used},
           {"evals", r.evals},
           {"goal_reached", r.goal_reached},
           {"wall_time", r.wall_time}};
}

inline void from_json(const nlohmann::json& j, CoverageReport& r) {
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != kReportSchema) {
    throw Error(ErrorKind::InvalidConfig, "unsupported report schema '" + r.schema + "'");
  }
  r.file = j.at("file").get<std::string>();
  r.entry = j.at("entry").get<std::string>();
  r.line_pct = j.at("line_pct").get<double>();
  r.condition_pct = j.at("condition_pct").get<double>();
  r.branch_pct = j.at("branch_pct").get<double>();
  r.optimal_branch_pct = j.at("optimal_branch_pct").get<double>();
  const auto& call = j.at("call_pct");
  r.call_pct = call.is_number() ? std::optional<double>(call.get<double>()) : std::nullopt;
  r.lines_total = j.at("lines").at("total").get<int>();
  r.lines_covered = j.at("lines").at("covered").get<int>();
  r.conditions_total = j.at("conditions").at("total").get<int>();
  r.conditions_covered = j.at("conditions").at("covered").get<int>();
  r.branches_total = j.at("branch_counts").at("total").get<int>();
  r.branches_covered = j.at("branch_counts").at("covered").get<int>();
  r.branches_infeasible = j.at("branch_counts").at("infeasible").get<int>();
  r.calls_total = j.at("calls").at("total").get<int>();
  r.calls_covered = j.at("calls").at("covered").get<int>();
  r.line_hits.clear();
  for (const auto& l : j.at("line_hits")) {
    r.line_hits.emplace_back(l.at("line").get<int>(), l.at("hits").get<long long>());
  }
  r.branches.clear();
  for (const auto& b : j.at("branches")) {
    r.branches.push_back({b.at("id").get<std::string>(), b.at("line").get<int>(),
                          branch_status_from_string(b.at("status").get<std::string>())});
  }
  r.uninstrumentable.clear();
  for (const auto& u : j.at("uninstrumentable")) {
    r.uninstrumentable.push_back(
        {u.at("label").get<int>(), u.at("line").get<int>(), u.at("reason").get<std::string>()});
  }
  r.inputs = j.at("inputs").get<std::vector<Vec>>();
  r.starts_used = j.at("starts_used").get<int>();
  r.evals = j.at("evals").get<long long>();
  r.goal_reached = j.at("goal_reached").get<bool>();
  r.wall_time = j.at("wall_time").get<double>();
}

inline std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", v);
  return buf;
}

inline std::string format_input(const Vec& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

// Plain-text table in the shape of gcov's summary.
inline std::string render_text(const CoverageReport& r) {
  std::ostringstream os;
  os << "file: " << r.file << "  entry: " << r.entry << "\n";
  char row[160];
  std::snprintf(row, sizeof row, "  %-12s %8s  %s\n", "metric", "value", "detail");
  os << row;
  std::snprintf(row, sizeof row, "  %-12s %8s  %d/%d lines\n", "line", format_pct(r.line_pct).c_str(),
                r.lines_covered, r.lines_total);
  os << row;
  std::snprintf(row, sizeof row, "  %-12s %8s  %d/%d conditionals\n", "condition",
                format_pct(r.condition_pct).c_str(), r.conditions_covered, r.conditions_total);
  os << row;
  std::snprintf(row, sizeof row, "  %-12s %8s  %d/%d branches, %d deemed infeasible (%s of feasible)\n",
                "branch", format_pct(r.branch_pct).c_str(), r.branches_covered, r.branches_total,
                r.branches_infeasible, format_pct(r.optimal_branch_pct).c_str());
  os << row;
  std::snprintf(row, sizeof row, "  %-12s %8s  %d/%d call sites\n", "call",
                r.call_pct ? format_pct(*r.call_pct).c_str() : "n/a", r.calls_covered, r.calls_total);
  os << row;
  os << "branches:";
  for (const auto& b : r.branches) os << " " << b.id << "=" << to_string(b.status);
  os << "\n";
  for (const auto& u : r.uninstrumentable) {
    os << "uninstrumentable: conditional " << u.label << " (line " << u.line << "): " << u.reason << "\n";
  }
  os << "inputs (" << r.inputs.size() << "):";
  for (const auto& x : r.inputs) os << " " << format_input(x);
  os << "\n";
  char tail[160];
  std::snprintf(tail, sizeof tail, "starts: %d  evaluations: %lld  goal: %s  time: %.3fs\n", r.starts_used,
                r.evals, r.goal_reached ? "yes" : "no", r.wall_time);
  os << tail;
  return os.str();
}

}  // namespace mexec
