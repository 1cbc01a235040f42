// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mexec/mexec.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

mexec::Box parse_box(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--box expects lo:hi, got '" + text + "'");
  mexec::Box box;
  try {
    box.lo = std::stod(text.substr(0, colon));
    box.hi = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--box expects numbers, got '" + text + "'");
  }
  if (!(box.lo < box.hi)) throw UsageError("--box needs lo < hi");
  return box;
}

std::vector<mexec::BranchId> parse_path(const std::string& text) {
  std::vector<mexec::BranchId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = mexec::parse_branch_id(item);
    if (!b) throw mexec::Error(mexec::ErrorKind::MalformedPath, "bad branch id '" + item + "'");
    out.push_back(*b);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

bool is_front_end_error(mexec::ErrorKind k) {
  using mexec::ErrorKind;
  switch (k) {
    case ErrorKind::Syntax:
    case ErrorKind::UndeclaredIdentifier:
    case ErrorKind::DuplicateFunction:
    case ErrorKind::DuplicateParameter:
    case ErrorKind::TypeError:
    case ErrorKind::UnsupportedPointerUse:
    case ErrorKind::ArityMismatch:
    case ErrorKind::UnknownVariable:
    case ErrorKind::NonNumericExpression:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test input generation for floating-point programs by mathematical execution"};
  app.set_version_flag("--version", "mexec 0.1.0");

  std::vector<std::string> positional;
  std::string mode_opt;
  std::string entry;
  std::string box_text;
  std::string json_path;
  std::string path_text;
  std::string constraint_text;
  std::string vars_text;
  std::uint64_t seed = mexec::SearchConfig{}.seed;
  mexec::SearchConfig cfg;

  app.add_option("args", positional, "[MODE] FILE; MODE is cover, path, bva or sat");
  app.add_option("--mode", mode_opt, "cover | path | bva | sat")
      ->check(CLI::IsMember({"cover", "path", "bva", "sat"}));
  app.add_option("--entry", entry, "function under test (default: last defined)");
  app.add_option("--n-iter", cfg.mcmc.n_iter, "basinhopping iterations per start")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--n-start", cfg.n_start, "starting points")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--epsilon", cfg.epsilon, "branch distance epsilon")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--step-scale", cfg.mcmc.step_scale, "perturbation half-width")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--box", box_text, "search box lo:hi (default -1000:1000)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (falls back to MEXEC_SEED)")->capture_default_str();
  app.add_flag("--emit-instrumented", cfg.emit_instrumented, "print the instrumented source");
  app.add_option("--json", json_path, "write the JSON report here");
  app.add_option("--infeasible-after", cfg.infeasible_after, "same-branch failures before deeming infeasible")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--path", path_text, "target path for path mode, e.g. 0T,1T");
  app.add_option("--constraint", constraint_text, "constraint for sat mode, e.g. \"x*x >= 5 && x >= 0\"");
  app.add_option("--vars", vars_text, "comma-separated variable order for sat mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::string mode = "cover";
    std::string file;
    if (positional.size() == 2) {
      mode = positional[0];
      file = positional[1];
    } else if (positional.size() == 1) {
      file = positional[0];
    } else if (positional.size() > 2) {
      throw UsageError("expected [MODE] FILE");
    }
    if (!mode_opt.empty()) {
      if (positional.size() == 2 && mode_opt != mode) throw UsageError("conflicting modes");
      mode = mode_opt;
    }
    if (positional.size() == 1 && (file == "cover" || file == "path" || file == "bva" || file == "sat")) {
      mode = file;
      file.clear();
    }
    if (mode != "cover" && mode != "path" && mode != "bva" && mode != "sat") {
      throw UsageError("unknown mode '" + mode + "'");
    }
    if (seed_opt->count() == 0) {
      if (const char* env = std::getenv("MEXEC_SEED")) {
        try {
          seed = std::stoull(env);
        } catch (const std::exception&) {
          throw UsageError("MEXEC_SEED is not an unsigned integer");
        }
      }
    }
    cfg.seed = seed;
    if (!box_text.empty()) cfg.box = parse_box(box_text);

    if (mode == "sat") {
      std::string text = constraint_text;
      if (text.empty()) {
        if (file.empty()) throw UsageError("sat mode needs --constraint or a constraint file");
        text = read_file(file);
      }
      std::vector<std::string> vars;
      if (!vars_text.empty()) {
        std::stringstream ss(vars_text);
        std::string v;
        while (std::getline(ss, v, ',')) vars.push_back(v);
      }
      mexec::Constraint c = mexec::parse_constraint(text, vars);
      mexec::SatResult r = mexec::check_sat(c, cfg);
      std::cout << "verdict: " << mexec::to_string(r.verdict) << "\n";
      std::cout << "variables:";
      for (const auto& v : c.variables) std::cout << " " << v;
      std::cout << "\n";
      if (r.model) std::cout << "model: " << mexec::format_input(*r.model) << "\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", r.residual);
      std::cout << "residual: " << buf << "\n";
      std::cout << "starts: " << r.starts_used << "  evaluations: " << r.evals << "\n";
      nlohmann::json j{{"schema", mexec::kReportSchema},
                       {"mode", "sat"},
                       {"verdict", mexec::to_string(r.verdict)},
                       {"variables", c.variables},
                       {"model", r.model ? nlohmann::json(*r.model) : nlohmann::json(nullptr)},
                       {"residual", r.residual},
                       {"starts_used", r.starts_used},
                       {"evals", r.evals},
                       {"wall_time", r.wall_time}};
      write_json(json_path, j);
      return kExitOk;
    }

    if (file.empty()) throw UsageError("missing program file");
    const std::string source = read_file(file);
    mexec::Program prog;
    try {
      prog = mexec::parse(source, file);
      if (!entry.empty()) prog = prog.with_entry(entry);
      prog = mexec::prepare(prog);
    } catch (const mexec::Error& e) {
      if (e.kind() == mexec::ErrorKind::UnknownFunction) throw UsageError(e.what());
      std::cerr << file << ": " << e.what() << "\n";
      return kExitParse;
    }

    if (mode == "cover") {
      if (cfg.emit_instrumented) std::cout << mexec::print_instrumented(prog, mexec::RepFunConfig::coverage(cfg.epsilon)) << "\n";
      mexec::TestSuiteResult r = mexec::run_coverage(prog, cfg);
      mexec::CoverageReport rep = mexec::coverage_report(r);
      std::cout << mexec::render_text(rep);
      write_json(json_path, nlohmann::json(rep));
      return kExitOk;
    }
    if (mode == "path") {
      if (path_text.empty()) throw UsageError("path mode needs --path, e.g. --path 0T,1T");
      auto target = parse_path(path_text);
      if (cfg.emit_instrumented) std::cout << mexec::print_instrumented(prog, mexec::RepFunConfig::path(target, cfg.epsilon)) << "\n";
      mexec::PathResult r = mexec::run_path(prog, target, cfg);
      if (r.found) {
        std::cout << "found: " << mexec::format_input(r.x) << "\n";
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        std::cout << "not found (best value " << buf << ")\n";
      }
      std::cout << "starts: " << r.starts_used << "  evaluations: " << r.evals << "\n";
      std::vector<std::string> taken;
      for (auto b : r.trace.path) taken.push_back(b.str());
      nlohmann::json j{{"schema", mexec::kReportSchema},
                       {"mode", "path"},
                       {"file", file},
                       {"entry", prog.entry_function().name},
                       {"target", path_text},
                       {"found", r.found},
                       {"input", r.found ? nlohmann::json(r.x) : nlohmann::json(nullptr)},
                       {"executed_path", taken},
                       {"value", r.value},
                       {"starts_used", r.starts_used},
                       {"evals", r.evals},
                       {"wall_time", r.wall_time}};
      write_json(json_path, j);
      return kExitOk;
    }
    // bva
    if (cfg.emit_instrumented) std::cout << mexec::print_instrumented(prog, mexec::RepFunConfig::bva(cfg.epsilon)) << "\n";
    mexec::BvaResult r = mexec::run_bva(prog, cfg);
    std::cout << "boundary inputs (" << r.inputs.size() << "):\n";
    for (const auto& x : r.inputs) std::cout << "  " << mexec::format_input(x) << "\n";
    std::cout << "starts: " << r.starts_used << "  evaluations: " << r.evals << "\n";
    nlohmann::json j{{"schema", mexec::kReportSchema},
                     {"mode", "bva"},
                     {"file", file},
                     {"entry", prog.entry_function().name},
                     {"inputs", r.inputs},
                     {"starts_used", r.starts_used},
                     {"evals", r.evals},
                     {"wall_time", r.wall_time}};
    write_json(json_path, j);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "mexec: " << e.what() << "\n" << "run 'mexec --help' for usage\n";
    return kExitUsage;
  } catch (const mexec::Error& e) {
    std::cerr << "mexec: " << e.what() << "\n";
    return is_front_end_error(e.kind()) ? kExitParse : kExitUsage;
  }
}
