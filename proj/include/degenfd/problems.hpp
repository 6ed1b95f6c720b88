#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "degenfd/solver.hpp"

namespace degenfd {

using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<std::vector<double>(std::span<const double>)>;
using MatrixField = std::function<Matrix(std::span<const double>)>;

/// A benchmark with a known exact solution. Boundary data is the exact
/// solution restricted to the boundary; the source is induced from it.
struct ManufacturedProblem {
  std::string name;
  std::vector<double> lower, upper;
  ScalarField exact;
  VectorField exact_grad;
  MatrixField exact_hess;
  IsaacsOperator op;
  DegeneracyLaw law;
  ScalarField ansatz;  // initial guess for the Euler iteration
  double default_pseudo_time = 1.0;
  std::optional<double> reference_error;  // published max error at h = 0.01

  std::size_t dim() const noexcept { return lower.size(); }

  /// Copy whose transmission ramp width is eps (no-op for constant laws).
  ManufacturedProblem with_eps(double eps) const {
    ManufacturedProblem p = *this;
    p.law = law.with_ramp_width(eps);
    return p;
  }
};

/// f(x) = |D u(x)|^theta* F(D^2 u(x)) with exact derivatives and
/// theta* = law.exponent(u(x)).
inline double manufactured_source(const ManufacturedProblem& p, std::span<const double> x) {
  const std::vector<double> grad = p.exact_grad(x);
  double norm2 = 0.0;
  for (double gi : grad) norm2 += gi * gi;
  const double theta = p.law.exponent(p.exact(x));
  return std::pow(std::sqrt(norm2), theta) * isaacs_eval(p.op, p.exact_hess(x));
}

namespace detail {
inline Matrix scalar_matrix(double v) { return Matrix::Constant(1, 1, v); }
}  // namespace detail

/// The three one-dimensional benchmarks with F = -D^2:
///   example1: (1 - x^2)^2 on (-1, 1), theta = 2
///   example2: log x on (1/2, 3/2), theta1 = 2, theta2 = 4
///   example3: x^2 (x > 0), -x^4 (x < 0) on (-1, 1), theta1 = 2, theta2 = 4
/// Transmission laws carry a placeholder ramp width; make_setup rebinds it to
/// the regularisation parameter.
inline std::vector<ManufacturedProblem> builtin_examples() {
  const IsaacsOperator lap = IsaacsOperator::negative_laplacian(1);
  std::vector<ManufacturedProblem> out;

  out.push_back({"example1",
                 {-1.0},
                 {1.0},
                 [](std::span<const double> x) { return (1.0 - x[0] * x[0]) * (1.0 - x[0] * x[0]); },
                 [](std::span<const double> x) { return std::vector<double>{-4.0 * x[0] * (1.0 - x[0] * x[0])}; },
                 [](std::span<const double> x) { return detail::scalar_matrix(12.0 * x[0] * x[0] - 4.0); },
                 lap,
                 DegeneracyLaw::constant(2.0),
                 [](std::span<const double> x) { return (1.0 - x[0]) * (1.0 + x[0]); },
                 1.0,
                 8.2137e-3});

  out.push_back({"example2",
                 {0.5},
                 {1.5},
                 [](std::span<const double> x) { return std::log(x[0]); },
                 [](std::span<const double> x) { return std::vector<double>{1.0 / x[0]}; },
                 [](std::span<const double> x) { return detail::scalar_matrix(-1.0 / (x[0] * x[0])); },
                 lap,
                 DegeneracyLaw::transmission(2.0, 4.0, 0.01),
                 [](std::span<const double> x) { return x[0]; },
                 0.3,
                 4.3047e-3});

  out.push_back({"example3",
                 {-1.0},
                 {1.0},
                 [](std::span<const double> x) { return x[0] > 0.0 ? x[0] * x[0] : -std::pow(x[0], 4); },
                 [](std::span<const double> x) {
                   return std::vector<double>{x[0] > 0.0 ? 2.0 * x[0] : -4.0 * std::pow(x[0], 3)};
                 },
                 [](std::span<const double> x) {
                   return detail::scalar_matrix(x[0] > 0.0 ? 2.0 : -12.0 * x[0] * x[0]);
                 },
                 lap,
                 DegeneracyLaw::transmission(2.0, 4.0, 0.01),
                 [](std::span<const double> x) { return x[0]; },
                 0.3,
                 1.3222e-2});
  return out;
}

inline ManufacturedProblem builtin_example(std::string_view name) {
  for (auto& p : builtin_examples())
    if (p.name == name) return p;
  throw InputError("unknown built-in problem '" + std::string(name) + "'");
}

/// One-dimensional problem with a polynomial exact solution
/// u(x) = sum_k c_k x^k and F = -D^2. The ansatz interpolates the boundary
/// values linearly.
inline ManufacturedProblem polynomial_problem(std::string name, double lower, double upper,
                                              std::vector<double> coeffs, DegeneracyLaw law) {
  if (coeffs.empty()) throw InputError("polynomial needs at least one coefficient");
  auto eval = [coeffs](double x, int deriv) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(deriv);) {
      double factor = 1.0;
      for (int j = 0; j < deriv; ++j) factor *= static_cast<double>(k - static_cast<std::size_t>(j));
      acc = acc * x + factor * coeffs[k];
    }
    return acc;
  };
  const double ua = eval(lower, 0), ub = eval(upper, 0);
  return {std::move(name),
          {lower},
          {upper},
          [eval](std::span<const double> x) { return eval(x[0], 0); },
          [eval](std::span<const double> x) { return std::vector<double>{eval(x[0], 1)}; },
          [eval](std::span<const double> x) { return detail::scalar_matrix(eval(x[0], 2)); },
          IsaacsOperator::negative_laplacian(1),
          std::move(law),
          [=](std::span<const double> x) { return ua + (ub - ua) * (x[0] - lower) / (upper - lower); },
          1.0,
          std::nullopt};
}

enum class InitialGuess { Ansatz, Zero };

struct ProblemSetup {
  ManufacturedProblem problem;  // with the ramp width bound to eps
  Grid grid;
  Scheme scheme;
  GridFunction initial;
};

/// Grid, scheme and initial iterate for a problem at spacing h and
/// regularisation eps. Boundary entries of the initial iterate equal g.
inline ProblemSetup make_setup(const ManufacturedProblem& problem, double h, double eps,
                               InitialGuess initial = InitialGuess::Ansatz, bool homogeneous_fallback = false) {
  ManufacturedProblem p = problem.with_eps(eps);
  Grid grid = build_grid(p.lower, p.upper, h);
  GridFunction f = GridFunction::sample(grid, [&](std::span<const double> x) { return manufactured_source(p, x); });
  GridFunction g = GridFunction::sample(grid, p.exact);
  GridFunction u0 = initial == InitialGuess::Ansatz ? GridFunction::sample(grid, p.ansatz) : GridFunction(grid);
  for (std::size_t n : grid.boundary_nodes()) u0[n] = g[n];
  Scheme scheme(SchemeParams{p.op, p.law, eps, std::move(f), std::move(g), homogeneous_fallback});
  return {std::move(p), grid, std::move(scheme), std::move(u0)};
}

/// max over all nodes of |u_h(x) - u(x)|.
inline double max_error(const GridFunction& uh, const ManufacturedProblem& p) {
  const Grid& grid = uh.grid();
  if (grid.dim() != p.dim()) throw InputError("grid and problem dimensions differ");
  for (std::size_t a = 0; a < p.dim(); ++a)
    if (std::abs(grid.lower()[a] - p.lower[a]) > 1e-12 || std::abs(grid.upper()[a] - p.upper[a]) > 1e-12)
      throw InputError("grid domain does not match problem '" + p.name + "'");
  double err = 0.0;
  std::vector<double> x(grid.dim());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(n, a);
    err = std::max(err, std::abs(uh[n] - p.exact(x)));
  }
  return err;
}

/// Pointwise |u_h - u| as a grid function.
inline GridFunction error_field(const GridFunction& uh, const ManufacturedProblem& p) {
  GridFunction exact = GridFunction::sample(uh.grid(), p.exact);
  for (std::size_t n = 0; n < uh.size(); ++n) exact[n] = std::abs(uh[n] - exact[n]);
  return exact;
}

struct StudyOptions {
  double rho_factor = 0.01;               // rho = rho_factor * h^2
  std::optional<double> pseudo_time;      // defaults to the problem's
  InitialGuess initial = InitialGuess::Ansatz;
};

struct ConvergenceRow {
  double h = 0.0;
  double eps = 0.0;
  std::size_t iterations = 0;
  std::optional<double> max_error;  // empty when the solve failed
  std::string status = "ok";
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<double> order;  // least-squares slope of log(error) vs log(h)
};

/// Least-squares slope of log(y) against log(x); empty with fewer than two
/// usable points or non-positive values.
inline std::optional<double> log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) continue;
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

/// One solve per h with eps = h and rho = rho_factor * h^2, run to the
/// pseudo-time target. Failed solves are recorded, not thrown.
inline ConvergenceTable convergence_study(const ManufacturedProblem& problem, std::span<const double> h_list,
                                          const StudyOptions& opts = {}) {
  ConvergenceTable table;
  std::vector<double> hs, errs;
  for (double h : h_list) {
    ConvergenceRow row;
    row.h = h;
    row.eps = h;
    try {
      ProblemSetup setup = make_setup(problem, h, h, opts.initial);
      SolverConfig cfg;
      cfg.rho = opts.rho_factor * h * h;
      cfg.target_pseudo_time = opts.pseudo_time.value_or(problem.default_pseudo_time);
      SolveResult res = solve(setup.scheme, cfg, setup.initial);
      row.iterations = res.report.iterations;
      row.max_error = max_error(res.solution, setup.problem);
      hs.push_back(h);
      errs.push_back(*row.max_error);
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  table.order = log_log_slope(hs, errs);
  return table;
}

}  // namespace degenfd
