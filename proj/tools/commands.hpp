#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace degenfd::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 1, kNumericalFailure = 2 };

using Json = nlohmann::ordered_json;

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Columns x0..x{d-1}, u_h, then u_exact and error when an exact solution is given.
inline void write_solution_csv(std::ostream& out, const GridFunction& uh, const ManufacturedProblem* exact) {
  const Grid& grid = uh.grid();
  for (std::size_t a = 0; a < grid.dim(); ++a) out << 'x' << a << ',';
  out << "u_h";
  if (exact) out << ",u_exact,error";
  out << '\n';
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const std::vector<double> x = grid.point(n);
    for (double xi : x) out << format_g17(xi) << ',';
    out << format_g17(uh[n]);
    if (exact) {
      const double ue = exact->exact(x);
      out << ',' << format_g17(ue) << ',' << format_g17(std::abs(uh[n] - ue));
    }
    out << '\n';
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

inline Json solve_report_json(const std::string& problem, double h, double eps, const SolveReport& rep,
                              std::optional<double> max_err, std::uint64_t seed, Json resolved) {
  Json j;
  j["problem"] = problem;
  j["h"] = h;
  j["epsilon"] = eps;
  j["rho"] = rep.rho_used;
  j["iterations"] = rep.iterations;
  j["final_residual"] = rep.final_residual;
  j["max_error"] = max_err ? Json(*max_err) : Json(nullptr);
  j["cfl_bound"] = rep.cfl_bound;
  j["converged"] = rep.converged;
  j["seed"] = seed;
  j["resolved_config"] = std::move(resolved);
  j["pseudo_time"] = rep.pseudo_time();
  Json hist = Json::array();
  for (const auto& e : rep.residual_history) hist.push_back({e.iteration, e.residual});
  j["residual_history"] = std::move(hist);
  return j;
}

/// Loads, sets up and solves per the config; writes the solution CSV and report JSON.
inline int cmd_solve(const std::filesystem::path& config_path, std::ostream& log = std::cerr) {
  try {
    const RunConfig cfg = load_config(config_path);
    const double eps = cfg.eps_value();
    ProblemSetup setup = make_setup(cfg.resolved_problem, cfg.h, eps, cfg.initial);
    const SolverConfig sc = solver_config(cfg, setup.scheme);
    const SolveResult res = solve(setup.scheme, sc, setup.initial);
    const double err = max_error(res.solution, setup.problem);

    std::ostringstream csv;
    write_solution_csv(csv, res.solution, &setup.problem);
    write_file(cfg.solution_csv, csv.str());
    const Json rep = solve_report_json(cfg.problem, cfg.h, eps, res.report, err, cfg.seed,
                                       resolved_json(cfg, setup.scheme));
    write_file(cfg.report_json, rep.dump(2) + "\n");
    log << cfg.problem << ": iterations " << res.report.iterations << ", residual "
        << format_g17(res.report.final_residual) << ", max error " << format_g17(err) << '\n';
    if (!res.report.converged) {
      log << "did not converge within max_iters\n";
      return kNumericalFailure;
    }
    return kSuccess;
  } catch (const InputError& e) {
    log << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

struct BenchmarkRow {
  std::string example;
  double h, eps, pseudo_time, max_error, reference_error;
  std::size_t iterations;
  bool within_factor_two;
};

/// Runs the three built-in benchmarks at h = 0.01, eps = h, rho = 0.01 h^2
/// to their default pseudo-times, writing per-example CSV/JSON and a
/// summary table into out_dir.
inline std::vector<BenchmarkRow> run_benchmarks(const std::filesystem::path& out_dir, std::uint64_t seed) {
  std::vector<BenchmarkRow> rows;
  std::ostringstream summary;
  summary << "example,h,epsilon,n_rho,max_error,reference_error\n";
  for (const ManufacturedProblem& p : builtin_examples()) {
    const double h = 0.01, eps = h;
    ProblemSetup setup = make_setup(p, h, eps);
    SolverConfig sc;
    sc.rho = preset_rho(h);
    sc.target_pseudo_time = p.default_pseudo_time;
    const SolveResult res = solve(setup.scheme, sc, setup.initial);
    const double err = max_error(res.solution, setup.problem);
    const double ref = p.reference_error.value_or(0.0);
    rows.push_back({p.name, h, eps, res.report.pseudo_time(), err, ref, res.report.iterations, err <= 2.0 * ref});

    std::ostringstream csv;
    write_solution_csv(csv, res.solution, &setup.problem);
    write_file(out_dir / (p.name + "_solution.csv"), csv.str());
    Json resolved;
    resolved["problem"] = p.name;
    resolved["law"] = setup.problem.law.describe();
    resolved["h"] = h;
    resolved["epsilon_mode"] = "couple_to_h";
    resolved["rho_mode"] = "preset_0.01h2";
    resolved["pseudo_time"] = p.default_pseudo_time;
    resolved["initial"] = "ansatz";
    const Json rep = solve_report_json(p.name, h, eps, res.report, err, seed, std::move(resolved));
    write_file(out_dir / (p.name + "_report.json"), rep.dump(2) + "\n");
    summary << p.name << ',' << format_g17(h) << ',' << format_g17(eps) << ',' << format_g17(res.report.pseudo_time())
            << ',' << format_g17(err) << ',' << format_g17(ref) << '\n';
  }
  write_file(out_dir / "summary.csv", summary.str());
  return rows;
}

inline int cmd_benchmarks(const std::filesystem::path& out_dir, std::uint64_t seed, std::ostream& out = std::cout,
                          std::ostream& log = std::cerr) {
  try {
    const auto rows = run_benchmarks(out_dir, seed);
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %6s %8s %6s %12s %15s\n", "example", "h", "eps", "n_rho", "max_error",
                  "reference_error");
    out << line;
    bool all = true;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-10s %6.3g %8.3g %6.3g %12.4e %15.4e%s\n", r.example.c_str(), r.h, r.eps,
                    r.pseudo_time, r.max_error, r.reference_error, r.within_factor_two ? "" : "  (outside 2x)");
      out << line;
      all = all && r.within_factor_two;
    }
    return all ? kSuccess : kNumericalFailure;
  } catch (const InputError& e) {
    log << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

/// Commas and line breaks in free text would split CSV fields.
inline std::string csv_field(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n'; }, ';');
  return s;
}

inline std::string convergence_csv(const ConvergenceTable& t) {
  std::ostringstream out;
  out << "h,epsilon,iterations,max_error,status,order\n";
  const std::string order = t.order ? format_g17(*t.order) : "";
  for (const auto& r : t.rows)
    out << format_g17(r.h) << ',' << format_g17(r.eps) << ',' << r.iterations << ','
        << (r.max_error ? format_g17(*r.max_error) : "") << ',' << csv_field(r.status) << ',' << order << '\n';
  return out.str();
}

/// Convergence table for the config's problem over h_list with eps = h and
/// rho = 0.01 h^2. Exit 2 when any row failed.
inline int cmd_converge(const std::filesystem::path& config_path, const std::vector<double>& h_list,
                        const std::optional<std::filesystem::path>& out_path, std::ostream& out = std::cout,
                        std::ostream& log = std::cerr) {
  try {
    if (h_list.empty()) throw InputError("--h needs at least one value");
    const RunConfig cfg = load_config(config_path);
    StudyOptions opts;
    opts.pseudo_time = cfg.pseudo_time;
    opts.initial = cfg.initial;
    const ConvergenceTable t = convergence_study(cfg.resolved_problem, h_list, opts);
    const std::string csv = convergence_csv(t);
    if (out_path) write_file(*out_path, csv);
    else out << csv;
    const bool failed = std::any_of(t.rows.begin(), t.rows.end(), [](const auto& r) { return !r.max_error; });
    for (const auto& r : t.rows)
      if (!r.max_error) log << "h = " << format_g17(r.h) << ": " << r.status << '\n';
    return failed ? kNumericalFailure : kSuccess;
  } catch (const InputError& e) {
    log << "input error: " << e.what() << '\n';
    return kInputError;
  }
}

inline Json suite_json(const VerificationSuiteReport& rep) {
  Json j;
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"trials", c.trials},
                      {"worst_violation", c.worst_violation},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  j["checks"] = std::move(checks);
  Json rows = Json::array();
  for (const auto& r : rep.consistency.rows) rows.push_back({{"h", r.h}, {"residual", r.residual}});
  j["consistency"] = {{"name", rep.consistency.name},
                      {"rows", std::move(rows)},
                      {"order", rep.consistency.order ? Json(*rep.consistency.order) : Json(nullptr)},
                      {"required_order", rep.consistency.required_order},
                      {"exact", rep.consistency.exact},
                      {"passed", rep.consistency.passed}};
  j["seed"] = rep.seed;
  j["passed"] = rep.passed();
  return j;
}

/// Solves per the config (for the barrier sandwich), runs the verification
/// suite and writes its JSON report. Exit 0 iff every check passes.
inline int cmd_verify(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_path,
                      std::ostream& log = std::cerr) {
  try {
    const RunConfig cfg = load_config(config_path);
    const double eps = cfg.eps_value();
    ProblemSetup setup = make_setup(cfg.resolved_problem, cfg.h, eps, cfg.initial);
    std::optional<GridFunction> solution;
    std::string solve_status = "ok";
    try {
      solution = solve(setup.scheme, solver_config(cfg, setup.scheme), setup.initial).solution;
    } catch (const NumericalError& e) {
      solve_status = e.what();
    }
    SuiteOptions opts;
    opts.trials = cfg.trials;
    opts.seed = cfg.seed;
    opts.consistency_h = cfg.consistency_h;
    const VerificationSuiteReport rep =
        run_suite(setup.scheme, consistency_case(cfg.resolved_problem, eps), opts, solution ? &*solution : nullptr);

    Json j;
    j["problem"] = cfg.problem;
    j["h"] = cfg.h;
    j["epsilon"] = eps;
    j["solve"] = solve_status;
    const Json suite = suite_json(rep);
    for (const auto& [k, v] : suite.items()) j[k] = v;
    j["resolved_config"] = resolved_json(cfg, setup.scheme);
    write_file(out_path.value_or(cfg.report_json), j.dump(2) + "\n");

    for (const auto& c : rep.checks)
      log << (c.passed ? "PASS " : "FAIL ") << c.name << " worst " << format_g17(c.worst_violation) << '\n';
    log << (rep.consistency.passed ? "PASS " : "FAIL ") << "consistency order "
        << (rep.consistency.order ? format_g17(*rep.consistency.order) : "exact") << '\n';
    return rep.passed() && solution ? kSuccess : kNumericalFailure;
  } catch (const InputError& e) {
    log << "input error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace degenfd::cli
