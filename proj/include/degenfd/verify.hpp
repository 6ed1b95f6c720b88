#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "degenfd/problems.hpp"

namespace degenfd {

/// Anything evaluable node by node on a grid, including test doubles.
template <class S>
concept DiscreteScheme = requires(const S& s, const GridFunction& u, std::size_t n) {
  { s.grid() } -> std::convertible_to<const Grid&>;
  { s.eval(u, n) } -> std::convertible_to<double>;
};

inline constexpr double kInequalitySlack = 1e-12;

struct CheckEntry {
  std::string name;
  std::size_t trials = 0;
  double worst_violation = -std::numeric_limits<double>::infinity();  // signed; <= tolerance means pass
  double tolerance = kInequalitySlack;
  bool passed = true;

  void record(double violation) {
    worst_violation = std::max(worst_violation, violation);
    passed = worst_violation <= tolerance;
  }
};

namespace detail {

inline std::size_t random_interior(const Grid& grid, Rng& rng) {
  const auto interior = grid.interior_nodes();
  if (interior.empty()) throw InputError("grid has no interior nodes");
  return interior[std::uniform_int_distribution<std::size_t>(0, interior.size() - 1)(rng)];
}

template <DiscreteScheme S>
double sup_apply_diff(const S& s, const GridFunction& u, const GridFunction& v) {
  double m = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) m = std::max(m, std::abs(s.eval(u, n) - s.eval(v, n)));
  return m;
}

}  // namespace detail

/// Random u <= v agreeing at one interior node x; violation is G(v, x) - G(u, x).
template <DiscreteScheme S>
CheckEntry check_monotonicity(const S& s, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("trials must be at least 1");
  const Grid& grid = s.grid();
  CheckEntry e{"monotonicity", trials};
  Rng rng(seed);
  std::uniform_real_distribution<double> lift(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const GridFunction u = random_grid_function(grid, rng);
    GridFunction v = u;
    for (std::size_t n = 0; n < v.size(); ++n) v[n] += lift(rng);
    const std::size_t x = detail::random_interior(grid, rng);
    v[x] = u[x];
    e.record(s.eval(v, x) - s.eval(u, x));
  }
  return e;
}

/// Raising the centre value must not lower G at that node; raising one node
/// of its 3^d box must not raise it.
template <DiscreteScheme S>
CheckEntry check_ellipticity(const S& s, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("trials must be at least 1");
  const Grid& grid = s.grid();
  CheckEntry e{"degenerate_ellipticity", trials};
  Rng rng(seed);
  std::uniform_real_distribution<double> bump(1e-3, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    GridFunction u = random_grid_function(grid, rng);
    const std::size_t x = detail::random_interior(grid, rng);
    const double base = s.eval(u, x);
    const auto nbrs = box_neighbors(grid, x);
    const std::size_t y = nbrs[std::uniform_int_distribution<std::size_t>(0, nbrs.size() - 1)(rng)];

    const double saved = u[x];
    u[x] += bump(rng);
    e.record(base - s.eval(u, x));
    u[x] = saved;
    u[y] += bump(rng);
    e.record(s.eval(u, x) - base);
  }
  return e;
}

/// Empirical ratio ||G u - G v|| / ||u - v|| against bound. Half the trials
/// use independent pairs, half small perturbations of one function.
template <DiscreteScheme S>
CheckEntry check_lipschitz(const S& s, double bound, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("trials must be at least 1");
  const Grid& grid = s.grid();
  CheckEntry e{"lipschitz", trials};
  Rng rng(seed);
  std::uniform_real_distribution<double> small(-1e-3, 1e-3);
  for (std::size_t t = 0; t < trials; ++t) {
    const GridFunction u = random_grid_function(grid, rng);
    GridFunction v = random_grid_function(grid, rng);
    if (t % 2 == 1)
      for (std::size_t n = 0; n < v.size(); ++n) v[n] = u[n] + small(rng);
    const double dist = sup_distance(u, v);
    const double ratio = dist > 0.0 ? detail::sup_apply_diff(s, u, v) / dist : 0.0;
    e.record(ratio - bound);
  }
  return e;
}

/// ||S u - S v|| <= ||u - v|| for the Euler map with parameter rho.
inline CheckEntry check_contraction(const Scheme& s, double rho, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("trials must be at least 1");
  const Grid& grid = s.grid();
  CheckEntry e{"contraction", trials};
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const GridFunction u = random_grid_function(grid, rng);
    const GridFunction v = random_grid_function(grid, rng);
    e.record(sup_distance(euler_step(s, u, rho), euler_step(s, v, rho)) - sup_distance(u, v));
  }
  return e;
}

/// Sign conditions G(lower) <= 0 <= G(upper) at every node, and, given a
/// solution, lower <= u_h <= upper.
inline CheckEntry check_barriers(const Scheme& s, const BarrierPair& pair,
                                 const GridFunction* solution = nullptr) {
  CheckEntry e{"barriers", 1};
  for (std::size_t n = 0; n < s.grid().size(); ++n) {
    e.record(s.eval(pair.lower, n));
    e.record(-s.eval(pair.upper, n));
    if (solution) {
      e.record(pair.lower[n] - (*solution)[n]);
      e.record((*solution)[n] - pair.upper[n]);
    }
  }
  return e;
}

/// A smooth test function with the continuous operator data it is compared
/// against: G(phi) = eps phi + F(D^2 phi) - f / (eps + |D phi|^2)^(theta*/2).
struct ConsistencyCase {
  std::string name;
  std::vector<double> lower, upper;
  ScalarField phi;
  VectorField grad;
  MatrixField hess;
  IsaacsOperator op;
  DegeneracyLaw law;
  double eps;
  ScalarField source;
  double min_gradient = 0.1;  // nodes with a smaller |D phi| are skipped
};

/// sin(2x) on (-1, 1) under the pure scheme with F = -D^2, theta = 2,
/// eps = 0.5 and f = 1.
inline ConsistencyCase sine_consistency_case() {
  return {"sin(2x)",
          {-1.0},
          {1.0},
          [](std::span<const double> x) { return std::sin(2.0 * x[0]); },
          [](std::span<const double> x) { return std::vector<double>{2.0 * std::cos(2.0 * x[0])}; },
          [](std::span<const double> x) { return detail::scalar_matrix(-4.0 * std::sin(2.0 * x[0])); },
          IsaacsOperator::negative_laplacian(1),
          DegeneracyLaw::constant(2.0),
          0.5,
          [](std::span<const double>) { return 1.0; }};
}

/// The exact solution of a manufactured problem as a test function, with its
/// own source and the transmission ramp bound to eps.
inline ConsistencyCase consistency_case(const ManufacturedProblem& problem, double eps) {
  ManufacturedProblem p = problem.with_eps(eps);
  ScalarField src = [p](std::span<const double> x) { return manufactured_source(p, x); };
  return {p.name, p.lower, p.upper, p.exact, p.exact_grad, p.exact_hess, p.op, p.law, eps, std::move(src)};
}

struct ConsistencyRow {
  double h;
  double residual;  // max over sampled interior nodes of |G_h(phi) - G(phi)|
};

struct ConsistencyReport {
  std::string name;
  std::vector<ConsistencyRow> rows;
  std::optional<double> order;  // empty when every residual is at round-off
  double required_order = 0.9;
  bool exact = false;
  bool passed = false;
};

inline double continuous_operator(const ConsistencyCase& c, std::span<const double> x) {
  const std::vector<double> grad = c.grad(x);
  double g2 = 0.0;
  for (double v : grad) g2 += v * v;
  const double val = c.phi(x);
  return c.eps * val + isaacs_eval(c.op, c.hess(x)) -
         c.source(x) / std::pow(c.eps + g2, 0.5 * c.law.exponent(val));
}

/// Residual of the sampled test function at each h and the fitted order.
/// Passes when the order reaches required_order or when every residual is
/// below 1e-12 (the stencils are exact on the test function).
inline ConsistencyReport check_consistency(const ConsistencyCase& c, std::span<const double> h_list,
                                           double required_order = 0.9) {
  if (h_list.empty()) throw InputError("consistency check needs at least one h");
  ConsistencyReport rep{c.name, {}, std::nullopt, required_order};
  std::vector<double> hs, rs;
  for (double h : h_list) {
    const Grid grid = build_grid(c.lower, c.upper, h);
    const GridFunction phi = GridFunction::sample(grid, c.phi);
    const GridFunction f = GridFunction::sample(grid, c.source);
    const Scheme s(SchemeParams{c.op, c.law, c.eps, f, GridFunction(grid), false});
    double worst = 0.0;
    for (std::size_t n : grid.interior_nodes()) {
      const std::vector<double> x = grid.point(n);
      double g2 = 0.0;
      for (double v : c.grad(x)) g2 += v * v;
      if (std::sqrt(g2) < c.min_gradient) continue;
      worst = std::max(worst, std::abs(s.eval(phi, n) - continuous_operator(c, x)));
    }
    rep.rows.push_back({h, worst});
    hs.push_back(h);
    rs.push_back(worst);
  }
  rep.exact = std::all_of(rs.begin(), rs.end(), [](double r) { return r <= 1e-12; });
  if (!rep.exact) rep.order = log_log_slope(hs, rs);
  rep.passed = rep.exact || (rep.order && *rep.order >= required_order);
  return rep;
}

struct SuiteOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::vector<double> consistency_h{0.1, 0.05, 0.025, 0.0125};
};

struct VerificationSuiteReport {
  std::vector<CheckEntry> checks;
  ConsistencyReport consistency;
  std::uint64_t seed = 0;

  bool passed() const noexcept {
    return consistency.passed && std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.passed; });
  }
};

/// Every check on one scheme. Each randomised check draws from its own
/// stream derived from the seed, so adding a check does not perturb others.
inline VerificationSuiteReport run_suite(const Scheme& s, const ConsistencyCase& consistency,
                                         const SuiteOptions& opts = {}, const GridFunction* solution = nullptr) {
  VerificationSuiteReport rep;
  rep.seed = opts.seed;
  rep.checks.push_back(check_monotonicity(s, opts.trials, opts.seed));
  rep.checks.push_back(check_ellipticity(s, opts.trials, opts.seed + 1));
  rep.checks.push_back(check_lipschitz(s, lipschitz_bound(s), opts.trials, opts.seed + 2));
  rep.checks.push_back(check_contraction(s, cfl_rho(s, 1.0), opts.trials, opts.seed + 3));
  rep.checks.push_back(check_barriers(s, build_barriers(s), solution));
  rep.consistency = check_consistency(consistency, opts.consistency_h);
  return rep;
}

}  // namespace degenfd
